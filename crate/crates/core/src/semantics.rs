//! Finite set-theoretic semantics.
//!
//! Every type denotes a finite, canonically ordered carrier. Functions are
//! extensional tables indexed by the domain carrier, so element equality is
//! decidable. Canonical order coincides with the derived `Ord` on [`Elem`].

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::monads::{make_monad, tables, ConstKind, MonadOptions, MonadSpec};
use crate::signature::Signature;
use crate::syntax::{Name, Term, Type};
use crate::typing::{self, Core, TypeCtx};

pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Elem {
    Unit,
    Bool(bool),
    Base(Name, u32),
    Tup(Arc<(Elem, Elem)>),
    /// Function table, one entry per element of the domain carrier.
    Fun(Arc<[Elem]>),
    Mon(MonV),
}

/// Monad-specific computation payloads.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum MonV {
    Id(Arc<Elem>),
    Bottom,
    Up(Arc<Elem>),
    Exn(u32),
    Ok(Arc<Elem>),
    /// Indexed by initial state: result and final state.
    State(Arc<[(Elem, u32)]>),
    /// Sorted, duplicate-free.
    Set(Arc<[Elem]>),
    /// Indexed by continuation (carrier of `X -> R`): the answer.
    Cont(Arc<[u32]>),
}

impl Elem {
    pub fn tup(a: Elem, b: Elem) -> Elem {
        Elem::Tup(Arc::new((a, b)))
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Unit => write!(f, "()"),
            Elem::Bool(b) => write!(f, "{b}"),
            Elem::Base(b, i) => write!(f, "{b}#{i}"),
            Elem::Tup(p) => write!(f, "({}, {})", p.0, p.1),
            Elem::Fun(t) => {
                write!(f, "fun[")?;
                for (i, v) in t.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
            Elem::Mon(m) => write!(f, "{m}"),
        }
    }
}

impl fmt::Display for MonV {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonV::Id(a) => write!(f, "{a}"),
            MonV::Bottom => write!(f, "bot"),
            MonV::Up(a) => write!(f, "up({a})"),
            MonV::Exn(e) => write!(f, "raise_{e}"),
            MonV::Ok(a) => write!(f, "ok({a})"),
            MonV::State(t) => {
                write!(f, "state[")?;
                for (s, (a, s1)) in t.iter().enumerate() {
                    if s > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{s}->({a}, {s1})")?;
                }
                write!(f, "]")
            }
            MonV::Set(t) => {
                write!(f, "{{")?;
                for (i, a) in t.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, "}}")
            }
            MonV::Cont(t) => {
                write!(f, "cont[")?;
                for (i, r) in t.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{r}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// The enumerated denotation of a type.
#[derive(Debug)]
pub struct Carrier {
    pub ty: Type,
    elems: Vec<Elem>,
    index: HashMap<Elem, u32>,
}

impl Carrier {
    fn new(ty: Type, elems: Vec<Elem>) -> Carrier {
        let index = elems
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as u32))
            .collect();
        Carrier { ty, elems, index }
    }

    pub fn elems(&self) -> &[Elem] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, e: &Elem) -> bool {
        self.index.contains_key(e)
    }

    pub fn index_of(&self, e: &Elem) -> Result<usize> {
        self.index
            .get(e)
            .map(|&i| i as usize)
            .ok_or_else(|| Error::Internal(format!("{e} is not in the carrier of `{}`", self.ty)))
    }
}

/// A signature, a monad and the memoized carriers over them.
pub struct Model {
    sig: Signature,
    monad: MonadSpec,
    budget: u64,
    carriers: RwLock<HashMap<Type, Arc<Carrier>>>,
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model")
            .field("sig", &self.sig)
            .field("monad", &self.monad)
            .field("budget", &self.budget)
            .finish()
    }
}

impl Model {
    pub fn new(sig: Signature, options: MonadOptions) -> Result<Model> {
        sig.validate()?;
        let monad = make_monad(sig.monad, &sig, options)?;
        Ok(Model {
            sig,
            monad,
            budget: DEFAULT_BUDGET,
            carriers: RwLock::new(HashMap::new()),
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Model {
        self.budget = budget;
        self
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn monad(&self) -> &MonadSpec {
        &self.monad
    }

    pub fn options(&self) -> MonadOptions {
        self.monad.options
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// |⟦t⟧|, saturating at `u128::MAX`.
    pub fn carrier_size(&self, t: &Type) -> Result<u128> {
        Ok(match t {
            Type::Unit => 1,
            Type::Bool => 2,
            Type::Base(b) => self
                .sig
                .base_size(b)
                .ok_or_else(|| crate::error::TypeError::UnknownBase(b.to_string()))?
                as u128,
            Type::Prod(a, b) => self.carrier_size(a)?.saturating_mul(self.carrier_size(b)?),
            Type::Arrow(a, b) => {
                let (d, c) = (self.carrier_size(a)?, self.carrier_size(b)?);
                if c <= 1 {
                    c
                } else if d > 128 {
                    u128::MAX
                } else {
                    (0..d).fold(1u128, |acc, _| acc.saturating_mul(c))
                }
            }
            Type::Comp(a) => self.monad.comp_size(self.carrier_size(a)?),
        })
    }

    fn check_budget(&self, t: &Type) -> Result<()> {
        let size = self.carrier_size(t)?;
        if size > self.budget as u128 {
            return Err(Error::Budget {
                what: t.to_string(),
                size: if size == u128::MAX {
                    "> 2^128".into()
                } else {
                    size.to_string()
                },
                budget: self.budget,
            });
        }
        Ok(())
    }

    /// The memoized carrier of `t`; an explicit budget error replaces any
    /// enumeration larger than the budget.
    pub fn carrier(&self, t: &Type) -> Result<Arc<Carrier>> {
        if let Some(c) = self.carriers.read().expect("carrier cache").get(t) {
            return Ok(c.clone());
        }
        self.check_budget(t)?;
        let elems = match t {
            Type::Unit => vec![Elem::Unit],
            Type::Bool => vec![Elem::Bool(false), Elem::Bool(true)],
            Type::Base(b) => {
                let n = self.sig.base_size(b).expect("checked by carrier_size");
                (0..n).map(|i| Elem::Base(b.clone(), i)).collect()
            }
            Type::Prod(a, b) => {
                let (ca, cb) = (self.carrier(a)?, self.carrier(b)?);
                ca.elems()
                    .iter()
                    .flat_map(|x| cb.elems().iter().map(move |y| Elem::tup(x.clone(), y.clone())))
                    .collect()
            }
            Type::Arrow(a, b) => {
                let (ca, cb) = (self.carrier(a)?, self.carrier(b)?);
                tables(cb.len(), ca.len())
                    .map(|t| Elem::Fun(t.into_iter().map(|i| cb.elems()[i].clone()).collect()))
                    .collect()
            }
            Type::Comp(a) => self.comp_elems(a)?,
        };
        let c = Arc::new(Carrier::new(t.clone(), elems));
        self.carriers
            .write()
            .expect("carrier cache")
            .entry(t.clone())
            .or_insert(c.clone());
        Ok(c)
    }

    /// Apply a function table of type `dom -> _` to an argument.
    pub fn apply(&self, dom: &Type, f: &Elem, a: &Elem) -> Result<Elem> {
        match f {
            Elem::Fun(t) => Ok(t[self.carrier(dom)?.index_of(a)?].clone()),
            other => Err(Error::Internal(format!("applying non-function {other}"))),
        }
    }

    /// Type-check and prepare `t` for evaluation under `ctx`, with the hole
    /// (if any) of type `hole`.
    pub fn compile(&self, ctx: &TypeCtx, t: &Term, hole: Option<&Type>) -> Result<Compiled> {
        let (core, ty) = typing::elaborate(ctx, t, &self.sig, self.options(), hole)?;
        let prog = self.prepare(&core)?;
        Ok(Compiled { prog, ty, depth: ctx.len() })
    }

    fn prepare(&self, c: &Core) -> Result<Prog> {
        let b = |c: &Core| -> Result<Box<Prog>> { Ok(Box::new(self.prepare(c)?)) };
        Ok(match c {
            Core::Var(i) => Prog::Var(*i),
            Core::Lam(dom, body) => Prog::Lam(self.carrier(dom)?, b(body)?),
            Core::App(f, a, dom) => Prog::App(b(f)?, b(a)?, self.carrier(dom)?),
            Core::Pair(x, y) => Prog::Pair(b(x)?, b(y)?),
            Core::Fst(x) => Prog::Fst(b(x)?),
            Core::Snd(x) => Prog::Snd(b(x)?),
            Core::Unit => Prog::Const(Elem::Unit),
            Core::Bool(v) => Prog::Const(Elem::Bool(*v)),
            Core::Lit(base, i) => Prog::Const(Elem::Base(base.clone(), *i)),
            Core::If(x, y, z) => Prog::If(b(x)?, b(y)?, b(z)?),
            Core::Val(x, ty) => Prog::Val(b(x)?, ty.clone()),
            Core::LetC(m, n, x, y) => Prog::LetC(b(m)?, b(n)?, x.clone(), y.clone()),
            Core::Const(k, args, ty) => Prog::Const(self.materialize(*k, args, ty)?),
            Core::ConstApp(k, args, a) => Prog::ConstApp(*k, args.clone(), b(a)?),
            Core::Hole => Prog::Hole,
        })
    }

    /// The denotation of an unapplied constant.
    fn materialize(&self, k: ConstKind, args: &[Type], ty: &Type) -> Result<Elem> {
        if !k.is_unary() {
            return self.const_value(k, args);
        }
        let Type::Arrow(dom, _) = ty else {
            return Err(Error::Internal(format!("constant {k} of non-arrow type {ty}")));
        };
        let dom = self.carrier(dom)?;
        Ok(Elem::Fun(
            dom.elems()
                .iter()
                .map(|a| self.apply_const(k, args, a))
                .collect::<Result<_>>()?,
        ))
    }

    /// Evaluate a closed term.
    pub fn eval_closed(&self, t: &Term) -> Result<Elem> {
        self.compile(&TypeCtx::new(), t, None)?.eval(self, &[], None)
    }

    /// Evaluate `t` under `env`, whose entries follow `ctx` in order.
    pub fn eval(&self, ctx: &TypeCtx, env: &[Elem], t: &Term) -> Result<Elem> {
        self.compile(ctx, t, None)?.eval(self, env, None)
    }

    /// Type of a closed term together with its denotation.
    pub fn denote(&self, t: &Term) -> Result<(Type, Elem)> {
        let c = self.compile(&TypeCtx::new(), t, None)?;
        let v = c.eval(self, &[], None)?;
        Ok((c.ty, v))
    }
}

#[derive(Debug)]
enum Prog {
    Var(usize),
    Lam(Arc<Carrier>, Box<Prog>),
    App(Box<Prog>, Box<Prog>, Arc<Carrier>),
    Pair(Box<Prog>, Box<Prog>),
    Fst(Box<Prog>),
    Snd(Box<Prog>),
    If(Box<Prog>, Box<Prog>, Box<Prog>),
    Val(Box<Prog>, Type),
    LetC(Box<Prog>, Box<Prog>, Type, Type),
    Const(Elem),
    ConstApp(ConstKind, Vec<Type>, Box<Prog>),
    Hole,
}

/// A type-checked term ready for repeated evaluation.
#[derive(Debug)]
pub struct Compiled {
    prog: Prog,
    pub ty: Type,
    depth: usize,
}

impl Compiled {
    pub fn eval(&self, model: &Model, env: &[Elem], hole: Option<&Elem>) -> Result<Elem> {
        if env.len() != self.depth {
            return Err(Error::Internal(format!(
                "environment has {} entries, context has {}",
                env.len(),
                self.depth
            )));
        }
        let mut stack = env.to_vec();
        run(model, &self.prog, &mut stack, hole)
    }
}

fn run(model: &Model, p: &Prog, env: &mut Vec<Elem>, hole: Option<&Elem>) -> Result<Elem> {
    match p {
        Prog::Var(i) => Ok(env[*i].clone()),
        Prog::Const(e) => Ok(e.clone()),
        Prog::Hole => hole
            .cloned()
            .ok_or_else(|| Error::Internal("hole evaluated without a value".into())),
        Prog::Lam(dom, body) => {
            let mut table = Vec::with_capacity(dom.len());
            for a in dom.elems() {
                env.push(a.clone());
                let v = run(model, body, env, hole);
                env.pop();
                table.push(v?);
            }
            Ok(Elem::Fun(table.into()))
        }
        Prog::App(f, a, dom) => {
            let f = run(model, f, env, hole)?;
            let a = run(model, a, env, hole)?;
            match f {
                Elem::Fun(t) => Ok(t[dom.index_of(&a)?].clone()),
                other => Err(Error::Internal(format!("applying non-function {other}"))),
            }
        }
        Prog::Pair(a, b) => Ok(Elem::tup(run(model, a, env, hole)?, run(model, b, env, hole)?)),
        Prog::Fst(a) | Prog::Snd(a) => match run(model, a, env, hole)? {
            Elem::Tup(pr) => Ok(if matches!(p, Prog::Fst(_)) {
                pr.0.clone()
            } else {
                pr.1.clone()
            }),
            other => Err(Error::Internal(format!("projection from {other}"))),
        },
        Prog::If(c, a, b) => match run(model, c, env, hole)? {
            Elem::Bool(true) => run(model, a, env, hole),
            Elem::Bool(false) => run(model, b, env, hole),
            other => Err(Error::Internal(format!("condition {other}"))),
        },
        Prog::Val(a, ty) => {
            let v = run(model, a, env, hole)?;
            model.ret(ty, v)
        }
        Prog::LetC(m, n, x, y) => {
            let mv = run(model, m, env, hole)?;
            let mut f = |a: &Elem| {
                env.push(a.clone());
                let r = run(model, n, env, hole);
                env.pop();
                r
            };
            model.bind(x, y, &mv, &mut f)
        }
        Prog::ConstApp(k, args, a) => {
            let a = run(model, a, env, hole)?;
            model.apply_const(*k, args, &a)
        }
    }
}
