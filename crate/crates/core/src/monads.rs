//! The six monads on finite sets: identity, partiality, exceptions, state,
//! non-determinism and continuations.
//!
//! Each monad contributes a computation carrier, unit and bind, its
//! constants, a relational lifting and the observation equality used at
//! `T bool`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result, TypeError};
use crate::logrel::Rel;
use crate::semantics::{Elem, Model, MonV};
use crate::signature::Signature;
use crate::syntax::Type;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum MonadKind {
    Identity,
    Partiality,
    Exceptions,
    State,
    Nondet,
    Continuation,
}

impl MonadKind {
    pub const ALL: [MonadKind; 6] = [
        MonadKind::Identity,
        MonadKind::Partiality,
        MonadKind::Exceptions,
        MonadKind::State,
        MonadKind::Nondet,
        MonadKind::Continuation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MonadKind::Identity => "identity",
            MonadKind::Partiality => "partiality",
            MonadKind::Exceptions => "exceptions",
            MonadKind::State => "state",
            MonadKind::Nondet => "nondet",
            MonadKind::Continuation => "continuation",
        }
    }
}

impl fmt::Display for MonadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MonadKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<MonadKind> {
        MonadKind::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown monad `{s}`")))
    }
}

/// Toggles that change the monad beyond its name.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct MonadOptions {
    /// Enable `ccall` under the continuation monad.
    pub ccall: bool,
    /// Admit the empty set as a non-deterministic computation.
    pub allow_empty: bool,
    /// Use the one-sided (lower) clause for the non-determinism lifting.
    pub one_sided: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum ConstKind {
    Diverge,
    Raise(u32),
    Handle(u32),
    Lookup,
    Update,
    Or,
    Ccall,
}

impl ConstKind {
    /// Recognize a constant name independently of the active monad.
    pub fn from_name(name: &str) -> Option<ConstKind> {
        match name {
            "diverge" => Some(ConstKind::Diverge),
            "lookup" => Some(ConstKind::Lookup),
            "update" => Some(ConstKind::Update),
            "or" => Some(ConstKind::Or),
            "ccall" => Some(ConstKind::Ccall),
            _ => {
                let tag = |prefix: &str| {
                    name.strip_prefix(prefix)
                        .filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
                        .and_then(|d| d.parse().ok())
                };
                tag("raise_")
                    .map(ConstKind::Raise)
                    .or_else(|| tag("handle_").map(ConstKind::Handle))
            }
        }
    }

    pub fn name(self) -> String {
        match self {
            ConstKind::Diverge => "diverge".into(),
            ConstKind::Raise(e) => format!("raise_{e}"),
            ConstKind::Handle(e) => format!("handle_{e}"),
            ConstKind::Lookup => "lookup".into(),
            ConstKind::Update => "update".into(),
            ConstKind::Or => "or".into(),
            ConstKind::Ccall => "ccall".into(),
        }
    }

    pub fn type_arity(self) -> usize {
        match self {
            ConstKind::Lookup | ConstKind::Update => 0,
            ConstKind::Ccall => 2,
            _ => 1,
        }
    }

    /// Constants of function type take one argument and are applied by
    /// the evaluator directly.
    pub fn is_unary(self) -> bool {
        matches!(
            self,
            ConstKind::Handle(_) | ConstKind::Update | ConstKind::Or | ConstKind::Ccall
        )
    }

    pub fn monad(self) -> MonadKind {
        match self {
            ConstKind::Diverge => MonadKind::Partiality,
            ConstKind::Raise(_) | ConstKind::Handle(_) => MonadKind::Exceptions,
            ConstKind::Lookup | ConstKind::Update => MonadKind::State,
            ConstKind::Or => MonadKind::Nondet,
            ConstKind::Ccall => MonadKind::Continuation,
        }
    }

    /// Whether the signature's monad declares this constant (ignoring the
    /// `ccall` toggle, which typing enforces).
    pub fn available_in(self, sig: &Signature) -> bool {
        if self.monad() != sig.monad {
            return false;
        }
        match self {
            ConstKind::Raise(e) | ConstKind::Handle(e) => sig
                .exception_base
                .as_deref()
                .and_then(|b| sig.base_size(b))
                .is_some_and(|n| e < n),
            _ => true,
        }
    }

    /// The declared type instantiated at `args`.
    pub fn type_of(self, args: &[Type], sig: &Signature) -> Result<Type> {
        if args.len() != self.type_arity() {
            return Err(TypeError::ConstArity {
                name: self.name(),
                expected: self.type_arity(),
                found: args.len(),
            }
            .into());
        }
        let t = |t: &Type| Type::comp(t.clone());
        Ok(match self {
            ConstKind::Diverge | ConstKind::Raise(_) => t(&args[0]),
            ConstKind::Handle(_) | ConstKind::Or => {
                Type::arrow(Type::prod(t(&args[0]), t(&args[0])), t(&args[0]))
            }
            ConstKind::Lookup => Type::comp(
                sig.state_type()
                    .ok_or_else(|| TypeError::UnknownConst(self.name()))?,
            ),
            ConstKind::Update => Type::arrow(
                sig.state_type()
                    .ok_or_else(|| TypeError::UnknownConst(self.name()))?,
                Type::comp(Type::Unit),
            ),
            ConstKind::Ccall => {
                let (tau, sigma) = (&args[0], &args[1]);
                let k = Type::arrow(tau.clone(), t(sigma));
                Type::arrow(Type::arrow(k, t(tau)), t(tau))
            }
        })
    }

    /// The constants of a monad, listed for a given set of type arguments.
    pub fn instances(spec: &MonadSpec, universe: &[Type]) -> Vec<(ConstKind, Vec<Type>)> {
        let mut out = Vec::new();
        let one = |k: ConstKind, out: &mut Vec<_>| {
            for t in universe {
                out.push((k, vec![t.clone()]));
            }
        };
        match spec.kind {
            MonadKind::Identity => {}
            MonadKind::Partiality => one(ConstKind::Diverge, &mut out),
            MonadKind::Exceptions => {
                for e in 0..spec.exceptions {
                    one(ConstKind::Raise(e), &mut out);
                    one(ConstKind::Handle(e), &mut out);
                }
            }
            MonadKind::State => {
                out.push((ConstKind::Lookup, vec![]));
                out.push((ConstKind::Update, vec![]));
            }
            MonadKind::Nondet => one(ConstKind::Or, &mut out),
            MonadKind::Continuation => {
                if spec.options.ccall {
                    for t in universe {
                        for s in universe {
                            out.push((ConstKind::Ccall, vec![t.clone(), s.clone()]));
                        }
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for ConstKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// An immutable description of the active monad over a signature.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MonadSpec {
    pub kind: MonadKind,
    pub options: MonadOptions,
    /// |S| for state, otherwise 0.
    pub states: u32,
    /// |R| for continuations, otherwise 0.
    pub answers: u32,
    /// |E| for exceptions, otherwise 0.
    pub exceptions: u32,
    pub state_base: Option<Arc<str>>,
    pub answer_base: Option<Arc<str>>,
    pub exception_base: Option<Arc<str>>,
}

pub fn make_monad(kind: MonadKind, sig: &Signature, options: MonadOptions) -> Result<MonadSpec> {
    let size = |b: &Option<Arc<str>>, role: &str| -> Result<u32> {
        let b = b
            .as_ref()
            .ok_or_else(|| Error::Config(format!("monad `{kind}` needs a designated {role}")))?;
        sig.base_size(b)
            .ok_or_else(|| Error::Config(format!("{role} `{b}` is not a declared base")))
    };
    let mut spec = MonadSpec {
        kind,
        options,
        states: 0,
        answers: 0,
        exceptions: 0,
        state_base: None,
        answer_base: None,
        exception_base: None,
    };
    match kind {
        MonadKind::State => {
            spec.states = size(&sig.state_base, "state-base")?;
            spec.state_base = sig.state_base.clone();
        }
        MonadKind::Exceptions => {
            spec.exceptions = size(&sig.exception_base, "exception-base")?;
            spec.exception_base = sig.exception_base.clone();
        }
        MonadKind::Continuation => {
            spec.answers = size(&sig.answer_base, "answer-base")?;
            spec.answer_base = sig.answer_base.clone();
        }
        _ => {}
    }
    Ok(spec)
}

impl MonadSpec {
    /// |⟦T X⟧| given |⟦X⟧|, saturating.
    pub fn comp_size(&self, x: u128) -> u128 {
        let pow = |b: u128, e: u128| -> u128 {
            if e > 128 && b > 1 {
                return u128::MAX;
            }
            let mut acc: u128 = 1;
            for _ in 0..e {
                acc = acc.saturating_mul(b);
                if acc == u128::MAX {
                    break;
                }
            }
            acc
        };
        match self.kind {
            MonadKind::Identity => x,
            MonadKind::Partiality => x.saturating_add(1),
            MonadKind::Exceptions => x.saturating_add(self.exceptions as u128),
            MonadKind::State => {
                let s = self.states as u128;
                pow(x.saturating_mul(s), s)
            }
            MonadKind::Nondet => {
                let all = pow(2, x);
                if self.options.allow_empty {
                    all
                } else {
                    all.saturating_sub(1)
                }
            }
            MonadKind::Continuation => {
                let r = self.answers as u128;
                pow(r, pow(r, x))
            }
        }
    }

    pub fn answer_type(&self) -> Option<Type> {
        self.answer_base.as_ref().map(|b| Type::Base(b.clone()))
    }

    pub fn state_type(&self) -> Option<Type> {
        self.state_base.as_ref().map(|b| Type::Base(b.clone()))
    }

    fn state_elem(&self, s: u32) -> Elem {
        Elem::Base(self.state_base.clone().expect("state base"), s)
    }

    fn answer_elem(&self, r: u32) -> Elem {
        Elem::Base(self.answer_base.clone().expect("answer base"), r)
    }

    /// Observation equality at `T bool`: structural equality of payloads.
    pub fn observe_eq(&self, a: &Elem, b: &Elem) -> bool {
        a == b
    }
}

fn answer_index(e: &Elem) -> Result<u32> {
    match e {
        Elem::Base(_, r) => Ok(*r),
        other => Err(Error::Internal(format!("expected an answer, got {other}"))),
    }
}

fn mon(e: &Elem) -> Result<&MonV> {
    match e {
        Elem::Mon(m) => Ok(m),
        other => Err(Error::Internal(format!("expected a computation, got {other}"))),
    }
}

impl Model {
    /// All elements of ⟦T X⟧ in canonical order.
    pub(crate) fn comp_elems(&self, x: &Type) -> Result<Vec<Elem>> {
        let spec = self.monad();
        let xs = self.carrier(x)?;
        let xs = xs.elems();
        Ok(match spec.kind {
            MonadKind::Identity => xs.iter().map(|a| Elem::Mon(MonV::Id(Arc::new(a.clone())))).collect(),
            MonadKind::Partiality => std::iter::once(Elem::Mon(MonV::Bottom))
                .chain(xs.iter().map(|a| Elem::Mon(MonV::Up(Arc::new(a.clone())))))
                .collect(),
            MonadKind::Exceptions => (0..spec.exceptions)
                .map(|e| Elem::Mon(MonV::Exn(e)))
                .chain(xs.iter().map(|a| Elem::Mon(MonV::Ok(Arc::new(a.clone())))))
                .collect(),
            MonadKind::State => {
                let outcomes: Vec<(Elem, u32)> = xs
                    .iter()
                    .flat_map(|a| (0..spec.states).map(move |s| (a.clone(), s)))
                    .collect();
                tables(outcomes.len(), spec.states as usize)
                    .map(|t| {
                        Elem::Mon(MonV::State(t.iter().map(|&i| outcomes[i].clone()).collect()))
                    })
                    .collect()
            }
            MonadKind::Nondet => {
                let n = xs.len();
                let mut sets: Vec<Vec<Elem>> = Vec::with_capacity((1usize << n) - 1);
                let start = if spec.options.allow_empty { 0 } else { 1 };
                for mask in start..(1u64 << n) {
                    sets.push(
                        (0..n)
                            .filter(|i| mask >> i & 1 == 1)
                            .map(|i| xs[i].clone())
                            .collect(),
                    );
                }
                sets.sort();
                sets.into_iter().map(|s| Elem::Mon(MonV::Set(s.into()))).collect()
            }
            MonadKind::Continuation => {
                let kty = Type::arrow(x.clone(), spec.answer_type().expect("answer base"));
                let ks = self.carrier(&kty)?.len();
                tables(spec.answers as usize, ks)
                    .map(|t| Elem::Mon(MonV::Cont(t.iter().map(|&r| r as u32).collect())))
                    .collect()
            }
        })
    }

    pub fn ret(&self, x: &Type, a: Elem) -> Result<Elem> {
        let spec = self.monad();
        Ok(Elem::Mon(match spec.kind {
            MonadKind::Identity => MonV::Id(Arc::new(a)),
            MonadKind::Partiality => MonV::Up(Arc::new(a)),
            MonadKind::Exceptions => MonV::Ok(Arc::new(a)),
            MonadKind::State => MonV::State((0..spec.states).map(|s| (a.clone(), s)).collect()),
            MonadKind::Nondet => MonV::Set(vec![a].into()),
            MonadKind::Continuation => {
                let (ks, ai) = self.continuations(x, &a)?;
                MonV::Cont(
                    ks.elems()
                        .iter()
                        .map(|k| match k {
                            Elem::Fun(t) => answer_index(&t[ai]),
                            other => Err(Error::Internal(format!("bad continuation {other}"))),
                        })
                        .collect::<Result<_>>()?,
                )
            }
        }))
    }

    fn continuations(&self, x: &Type, a: &Elem) -> Result<(Arc<crate::semantics::Carrier>, usize)> {
        let spec = self.monad();
        let kty = Type::arrow(x.clone(), spec.answer_type().expect("answer base"));
        let ks = self.carrier(&kty)?;
        let ai = self.carrier(x)?.index_of(a)?;
        Ok((ks, ai))
    }

    /// `bind m f` where `m : T X` and `f : X -> T Y`, with `f` given as a
    /// function so that only the needed points are computed.
    pub fn bind(
        &self,
        x: &Type,
        y: &Type,
        m: &Elem,
        f: &mut dyn FnMut(&Elem) -> Result<Elem>,
    ) -> Result<Elem> {
        let spec = self.monad();
        match mon(m)? {
            MonV::Id(a) | MonV::Up(a) | MonV::Ok(a) => f(a),
            MonV::Bottom | MonV::Exn(_) => Ok(m.clone()),
            MonV::State(table) => {
                let mut cache: BTreeMap<&Elem, Elem> = BTreeMap::new();
                let mut out = Vec::with_capacity(table.len());
                for (a, s1) in table.iter() {
                    if !cache.contains_key(a) {
                        let fa = f(a)?;
                        cache.insert(a, fa);
                    }
                    match mon(&cache[a])? {
                        MonV::State(g) => out.push(g[*s1 as usize].clone()),
                        other => return Err(Error::Internal(format!("bad state value {other:?}"))),
                    }
                }
                Ok(Elem::Mon(MonV::State(out.into())))
            }
            MonV::Set(items) => {
                let mut acc: BTreeSet<Elem> = BTreeSet::new();
                for a in items.iter() {
                    match f(a)? {
                        Elem::Mon(MonV::Set(bs)) => acc.extend(bs.iter().cloned()),
                        other => return Err(Error::Internal(format!("bad set value {other}"))),
                    }
                }
                Ok(Elem::Mon(MonV::Set(acc.into_iter().collect())))
            }
            MonV::Cont(table) => {
                let xs = self.carrier(x)?;
                let rty = spec.answer_type().expect("answer base");
                let kx = self.carrier(&Type::arrow(x.clone(), rty.clone()))?;
                let ky = self.carrier(&Type::arrow(y.clone(), rty))?;
                let fx: Vec<Arc<[u32]>> = xs
                    .elems()
                    .iter()
                    .map(|a| match f(a)? {
                        Elem::Mon(MonV::Cont(t)) => Ok(t),
                        other => Err(Error::Internal(format!("bad continuation value {other}"))),
                    })
                    .collect::<Result<_>>()?;
                let mut out = Vec::with_capacity(ky.len());
                for j in 0..ky.len() {
                    let k: Arc<[Elem]> = fx.iter().map(|t| spec.answer_elem(t[j])).collect();
                    let ki = kx.index_of(&Elem::Fun(k))?;
                    out.push(table[ki]);
                }
                Ok(Elem::Mon(MonV::Cont(out.into())))
            }
        }
    }

    /// Denotation of a nullary constant.
    pub(crate) fn const_value(&self, c: ConstKind, args: &[Type]) -> Result<Elem> {
        let spec = self.monad();
        Ok(Elem::Mon(match c {
            ConstKind::Diverge => MonV::Bottom,
            ConstKind::Raise(e) => MonV::Exn(e),
            ConstKind::Lookup => {
                MonV::State((0..spec.states).map(|s| (spec.state_elem(s), s)).collect())
            }
            _ => {
                return Err(Error::Internal(format!(
                    "constant {c}[{}] is not nullary",
                    args.len()
                )))
            }
        }))
    }

    /// Apply a unary constant to its argument.
    pub(crate) fn apply_const(&self, c: ConstKind, args: &[Type], arg: &Elem) -> Result<Elem> {
        let spec = self.monad();
        match c {
            ConstKind::Handle(e) => match arg {
                Elem::Tup(p) => Ok(match &p.0 {
                    Elem::Mon(MonV::Exn(e2)) if *e2 == e => p.1.clone(),
                    m => m.clone(),
                }),
                other => Err(Error::Internal(format!("handle applied to {other}"))),
            },
            ConstKind::Or => match arg {
                Elem::Tup(p) => match (&p.0, &p.1) {
                    (Elem::Mon(MonV::Set(a)), Elem::Mon(MonV::Set(b))) => {
                        let u: BTreeSet<Elem> = a.iter().chain(b.iter()).cloned().collect();
                        Ok(Elem::Mon(MonV::Set(u.into_iter().collect())))
                    }
                    _ => Err(Error::Internal(format!("or applied to {arg}"))),
                },
                other => Err(Error::Internal(format!("or applied to {other}"))),
            },
            ConstKind::Update => match arg {
                Elem::Base(_, s) => Ok(Elem::Mon(MonV::State(
                    (0..spec.states).map(|_| (Elem::Unit, *s)).collect(),
                ))),
                other => Err(Error::Internal(format!("update applied to {other}"))),
            },
            ConstKind::Ccall => self.ccall(&args[0], &args[1], arg),
            _ => Err(Error::Internal(format!("constant {c} is not a function"))),
        }
    }

    /// call/cc: `ccall h = λk. h (λx. λk'. k x) k`.
    fn ccall(&self, tau: &Type, sigma: &Type, h: &Elem) -> Result<Elem> {
        let spec = self.monad();
        let rty = spec.answer_type().expect("answer base");
        let h = match h {
            Elem::Fun(t) => t,
            other => return Err(Error::Internal(format!("ccall applied to {other}"))),
        };
        let k_tau = self.carrier(&Type::arrow(tau.clone(), rty.clone()))?;
        let k_sigma = self.carrier(&Type::arrow(sigma.clone(), rty))?;
        let escapes = self.carrier(&Type::arrow(tau.clone(), Type::comp(sigma.clone())))?;
        let mut out = Vec::with_capacity(k_tau.len());
        for (ki, k) in k_tau.elems().iter().enumerate() {
            let Elem::Fun(kt) = k else {
                return Err(Error::Internal("bad continuation".into()));
            };
            let esc: Arc<[Elem]> = kt
                .iter()
                .map(|r| {
                    let r = answer_index(r)?;
                    Ok(Elem::Mon(MonV::Cont(vec![r; k_sigma.len()].into())))
                })
                .collect::<Result<_>>()?;
            let hi = escapes.index_of(&Elem::Fun(esc))?;
            match &h[hi] {
                Elem::Mon(MonV::Cont(c)) => out.push(c[ki]),
                other => return Err(Error::Internal(format!("bad ccall body {other}"))),
            }
        }
        Ok(Elem::Mon(MonV::Cont(out.into())))
    }

    /// Lift a relation on ⟦X⟧ to ⟦T X⟧.
    pub fn rel_lift(&self, x: &Type, r: &Rel) -> Result<Rel> {
        let spec = self.monad();
        let xs = self.carrier(x)?;
        if r.size() != xs.len() {
            return Err(Error::Relation(format!(
                "relation over {} elements lifted at `{x}` with {} elements",
                r.size(),
                xs.len()
            )));
        }
        let cs = self.carrier(&Type::comp(x.clone()))?;
        let n = cs.len();
        let mut out = Rel::empty(n);
        let idx = |e: &Elem| xs.index_of(e);
        match spec.kind {
            MonadKind::Identity | MonadKind::Partiality | MonadKind::Exceptions => {
                // None: bottom; Some(Err(e)): exception; Some(Ok(i)): value.
                let decode = |e: &Elem| -> Result<Option<std::result::Result<usize, u32>>> {
                    Ok(match mon(e)? {
                        MonV::Bottom => None,
                        MonV::Exn(e) => Some(Err(*e)),
                        MonV::Id(a) | MonV::Up(a) | MonV::Ok(a) => Some(Ok(idx(a)?)),
                        other => return Err(Error::Internal(format!("bad payload {other:?}"))),
                    })
                };
                let d: Vec<_> = cs.elems().iter().map(decode).collect::<Result<_>>()?;
                for i in 0..n {
                    for j in 0..n {
                        let related = match (&d[i], &d[j]) {
                            (None, None) => true,
                            (Some(Err(a)), Some(Err(b))) => a == b,
                            (Some(Ok(a)), Some(Ok(b))) => r.contains(*a, *b),
                            _ => false,
                        };
                        if related {
                            out.insert(i, j);
                        }
                    }
                }
            }
            MonadKind::State => {
                let d: Vec<Vec<(usize, u32)>> = cs
                    .elems()
                    .iter()
                    .map(|e| match mon(e)? {
                        MonV::State(t) => t.iter().map(|(a, s)| Ok((idx(a)?, *s))).collect(),
                        other => Err(Error::Internal(format!("bad payload {other:?}"))),
                    })
                    .collect::<Result<_>>()?;
                for i in 0..n {
                    for j in 0..n {
                        if d[i]
                            .iter()
                            .zip(&d[j])
                            .all(|((a, s1), (b, s2))| s1 == s2 && r.contains(*a, *b))
                        {
                            out.insert(i, j);
                        }
                    }
                }
            }
            MonadKind::Nondet => {
                let d: Vec<Vec<usize>> = cs
                    .elems()
                    .iter()
                    .map(|e| match mon(e)? {
                        MonV::Set(t) => t.iter().map(idx).collect(),
                        other => Err(Error::Internal(format!("bad payload {other:?}"))),
                    })
                    .collect::<Result<_>>()?;
                for i in 0..n {
                    for j in 0..n {
                        let forth = d[i].iter().all(|&a| d[j].iter().any(|&b| r.contains(a, b)));
                        let back = spec.options.one_sided
                            || d[j].iter().all(|&b| d[i].iter().any(|&a| r.contains(a, b)));
                        if forth && back {
                            out.insert(i, j);
                        }
                    }
                }
            }
            MonadKind::Continuation => {
                let kty = Type::arrow(x.clone(), spec.answer_type().expect("answer base"));
                let ks = self.carrier(&kty)?;
                let kd: Vec<Vec<u32>> = ks
                    .elems()
                    .iter()
                    .map(|k| match k {
                        Elem::Fun(t) => t.iter().map(answer_index).collect(),
                        other => Err(Error::Internal(format!("bad continuation {other}"))),
                    })
                    .collect::<Result<_>>()?;
                let rpairs: Vec<(usize, usize)> = r.pairs().collect();
                let mut kpairs = Vec::new();
                for (i1, k1) in kd.iter().enumerate() {
                    for (i2, k2) in kd.iter().enumerate() {
                        if rpairs.iter().all(|&(a, b)| k1[a] == k2[b]) {
                            kpairs.push((i1, i2));
                        }
                    }
                }
                let d: Vec<Arc<[u32]>> = cs
                    .elems()
                    .iter()
                    .map(|e| match mon(e)? {
                        MonV::Cont(t) => Ok(t.clone()),
                        other => Err(Error::Internal(format!("bad payload {other:?}"))),
                    })
                    .collect::<Result<_>>()?;
                for i in 0..n {
                    for j in 0..n {
                        if kpairs.iter().all(|&(k1, k2)| d[i][k1] == d[j][k2]) {
                            out.insert(i, j);
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// All functions `{0..positions} -> {0..values}` as index vectors, in
/// lexicographic order with the first position most significant.
pub(crate) fn tables(values: usize, positions: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur = if values == 0 && positions > 0 {
        None
    } else {
        Some(vec![0usize; positions])
    };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let c = cur.as_mut().unwrap();
        let mut i = positions;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            c[i] += 1;
            if c[i] < values {
                break;
            }
            c[i] = 0;
        }
        Some(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_enumeration() {
        let all: Vec<_> = tables(2, 2).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(tables(3, 0).count(), 1);
        assert_eq!(tables(3, 3).count(), 27);
    }

    #[test]
    fn constant_names_round_trip() {
        for c in [
            ConstKind::Diverge,
            ConstKind::Raise(1),
            ConstKind::Handle(0),
            ConstKind::Lookup,
            ConstKind::Update,
            ConstKind::Or,
            ConstKind::Ccall,
        ] {
            assert_eq!(ConstKind::from_name(&c.name()), Some(c));
        }
        assert_eq!(ConstKind::from_name("raise_"), None);
        assert_eq!(ConstKind::from_name("x"), None);
    }

    #[test]
    fn comp_sizes() {
        let sig = Signature::default_for(MonadKind::State);
        let st = make_monad(MonadKind::State, &sig, MonadOptions::default()).unwrap();
        assert_eq!(st.comp_size(2), 16);
        let sig = Signature::default_for(MonadKind::Continuation);
        let k = make_monad(MonadKind::Continuation, &sig, MonadOptions::default()).unwrap();
        assert_eq!(k.comp_size(2), 16);
        assert_eq!(k.comp_size(100), u128::MAX);
        let nd = make_monad(MonadKind::Nondet, &Signature::new(MonadKind::Nondet), Default::default())
            .unwrap();
        assert_eq!(nd.comp_size(2), 3);
    }

    #[test]
    fn missing_designated_base() {
        let sig = Signature::new(MonadKind::State);
        assert!(make_monad(MonadKind::State, &sig, MonadOptions::default()).is_err());
    }
}
