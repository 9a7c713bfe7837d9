//! Type-indexed logical relations generated from base relations.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::semantics::{Elem, Model};
use crate::syntax::{Name, Term, Type};
use crate::typing::TypeCtx;

/// Largest carrier a relation may be built over (the matrix is quadratic).
pub const MAX_REL_CARRIER: usize = 1 << 14;

/// A binary relation on one carrier, stored as a bit matrix over element
/// indices. Pairs iterate in lexicographic index order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rel {
    n: usize,
    bits: Vec<u64>,
}

impl Rel {
    pub fn empty(n: usize) -> Rel {
        Rel { n, bits: vec![0; (n * n).div_ceil(64)] }
    }

    pub fn identity(n: usize) -> Rel {
        let mut r = Rel::empty(n);
        for i in 0..n {
            r.insert(i, i);
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Rel> {
        let mut r = Rel::empty(n);
        for (a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::Relation(format!("pair ({a}, {b}) outside a carrier of {n}")));
            }
            r.insert(a, b);
        }
        Ok(r)
    }

    /// Size of the underlying carrier.
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        let k = a * self.n + b;
        self.bits[k / 64] >> (k % 64) & 1 == 1
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        let k = a * self.n + b;
        self.bits[k / 64] |= 1 << (k % 64);
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| (0..self.n).filter(move |&b| self.contains(a, b)).map(move |b| (a, b)))
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_subset(&self, other: &Rel) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn is_identity(&self) -> bool {
        *self == Rel::identity(self.n)
    }

    /// Every relation on an `n`-element carrier, in order of their bit masks.
    pub fn all(n: usize) -> impl Iterator<Item = Rel> {
        let cells = n * n;
        assert!(cells < 32, "too many relations to enumerate");
        (0u64..1 << cells).map(move |mask| {
            let mut r = Rel::empty(n);
            for k in 0..cells {
                if mask >> k & 1 == 1 {
                    r.insert(k / n, k % n);
                }
            }
            r
        })
    }
}

impl fmt::Debug for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rel{{")?;
        for (i, (a, b)) in self.pairs().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "({a},{b})")?;
        }
        write!(f, "}}")
    }
}

/// Base relations plus a memo of their liftings.
#[derive(Debug, Default)]
pub struct RelFamily {
    base: BTreeMap<Name, Rel>,
    memo: Mutex<HashMap<Type, Arc<Rel>>>,
}

impl Clone for RelFamily {
    fn clone(&self) -> RelFamily {
        RelFamily { base: self.base.clone(), memo: Mutex::default() }
    }
}

impl RelFamily {
    /// Identity relations on every base of the model's signature.
    pub fn identity(model: &Model) -> RelFamily {
        let base = model
            .sig()
            .bases
            .iter()
            .map(|(b, &n)| (b.clone(), Rel::identity(n as usize)))
            .collect();
        RelFamily { base, memo: Mutex::default() }
    }

    /// A family with only the given base relations.
    pub fn from_bases(base: BTreeMap<Name, Rel>) -> RelFamily {
        RelFamily { base, memo: Mutex::default() }
    }

    pub fn with_base(mut self, name: &str, rel: Rel) -> RelFamily {
        self.base.insert(name.into(), rel);
        self.clear_memo();
        self
    }

    pub fn base_rels(&self) -> &BTreeMap<Name, Rel> {
        &self.base
    }

    pub fn is_identity(&self) -> bool {
        self.base.values().all(Rel::is_identity)
    }

    pub fn clear_memo(&self) {
        self.memo.lock().expect("relation memo").clear();
    }

    /// The relation at type `t`.
    pub fn lift(&self, model: &Model, t: &Type) -> Result<Arc<Rel>> {
        for b in model.sig().designated() {
            if self.base.get(&b).is_some_and(|r| !r.is_identity()) {
                return Err(Error::Relation(format!(
                    "designated base `{b}` must be related by the identity"
                )));
            }
        }
        if let Some(r) = self.memo.lock().expect("relation memo").get(t) {
            return Ok(r.clone());
        }
        let r = Arc::new(self.lift_uncached(model, t)?);
        self.memo
            .lock()
            .expect("relation memo")
            .entry(t.clone())
            .or_insert(r.clone());
        Ok(r)
    }

    fn lift_uncached(&self, model: &Model, t: &Type) -> Result<Rel> {
        let carrier = model.carrier(t)?;
        let n = carrier.len();
        if n > MAX_REL_CARRIER {
            return Err(Error::Budget {
                what: format!("relation at {t}"),
                size: format!("{n}^2"),
                budget: (MAX_REL_CARRIER * MAX_REL_CARRIER) as u64,
            });
        }
        Ok(match t {
            Type::Unit | Type::Bool => Rel::identity(n),
            Type::Base(b) => {
                let r = self
                    .base
                    .get(b)
                    .ok_or_else(|| Error::Relation(format!("no base relation for `{b}`")))?;
                if r.size() != n {
                    return Err(Error::Relation(format!(
                        "relation for `{b}` is over {} elements, carrier has {n}",
                        r.size()
                    )));
                }
                r.clone()
            }
            Type::Prod(a, b) => {
                let (ra, rb) = (self.lift(model, a)?, self.lift(model, b)?);
                let (ca, cb) = (model.carrier(a)?, model.carrier(b)?);
                let parts: Vec<(usize, usize)> = carrier
                    .elems()
                    .iter()
                    .map(|e| match e {
                        Elem::Tup(p) => Ok((ca.index_of(&p.0)?, cb.index_of(&p.1)?)),
                        other => Err(Error::Internal(format!("non-pair {other}"))),
                    })
                    .collect::<Result<_>>()?;
                let mut out = Rel::empty(n);
                for (i, (a1, b1)) in parts.iter().enumerate() {
                    for (j, (a2, b2)) in parts.iter().enumerate() {
                        if ra.contains(*a1, *a2) && rb.contains(*b1, *b2) {
                            out.insert(i, j);
                        }
                    }
                }
                out
            }
            Type::Arrow(a, b) => {
                let (ra, rb) = (self.lift(model, a)?, self.lift(model, b)?);
                let cb = model.carrier(b)?;
                let tables: Vec<Vec<usize>> = carrier
                    .elems()
                    .iter()
                    .map(|e| match e {
                        Elem::Fun(t) => t.iter().map(|v| cb.index_of(v)).collect(),
                        other => Err(Error::Internal(format!("non-function {other}"))),
                    })
                    .collect::<Result<_>>()?;
                let dom_pairs: Vec<(usize, usize)> = ra.pairs().collect();
                let mut out = Rel::empty(n);
                for (i, f) in tables.iter().enumerate() {
                    for (j, g) in tables.iter().enumerate() {
                        if dom_pairs.iter().all(|&(x, y)| rb.contains(f[x], g[y])) {
                            out.insert(i, j);
                        }
                    }
                }
                out
            }
            Type::Comp(a) => {
                let ra = self.lift(model, a)?;
                model.rel_lift(a, &ra)?
            }
        })
    }

    /// Whether two elements of ⟦t⟧ are related.
    pub fn relates(&self, model: &Model, t: &Type, a: &Elem, b: &Elem) -> Result<bool> {
        let c = model.carrier(t)?;
        Ok(self.lift(model, t)?.contains(c.index_of(a)?, c.index_of(b)?))
    }
}

/// Whether two closed terms of type `t` have related denotations.
pub fn related(m: &Term, n: &Term, t: &Type, fam: &RelFamily, model: &Model) -> Result<bool> {
    let (mt, mv) = model.denote(m)?;
    let (nt, nv) = model.denote(n)?;
    for found in [mt, nt] {
        if &found != t {
            return Err(crate::error::TypeError::ArgMismatch { expected: t.clone(), found }.into());
        }
    }
    fam.relates(model, t, &mv, &nv)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BasicLemma {
    Holds { checked: usize },
    /// The first pair of related environments whose results are unrelated.
    Violated {
        left: Vec<Elem>,
        right: Vec<Elem>,
        left_result: Elem,
        right_result: Elem,
    },
}

impl BasicLemma {
    pub fn holds(&self) -> bool {
        matches!(self, BasicLemma::Holds { .. })
    }
}

/// Check that `t` maps every pair of pointwise related environments to
/// related results.
pub fn basic_lemma_check(
    t: &Term,
    ctx: &TypeCtx,
    fam: &RelFamily,
    model: &Model,
) -> Result<BasicLemma> {
    let prog = model.compile(ctx, t, None)?;
    let out_rel = fam.lift(model, &prog.ty)?;
    let out_carrier = model.carrier(&prog.ty)?;
    let mut choices: Vec<(Arc<crate::semantics::Carrier>, Vec<(usize, usize)>)> = Vec::new();
    for (_, ty) in ctx.iter() {
        let r = fam.lift(model, ty)?;
        choices.push((model.carrier(ty)?, r.pairs().collect()));
    }
    let total: usize = choices.iter().map(|(_, p)| p.len()).product();
    let decode = |mut k: usize| -> (Vec<Elem>, Vec<Elem>) {
        let mut left = vec![Elem::Unit; choices.len()];
        let mut right = left.clone();
        for (i, (c, pairs)) in choices.iter().enumerate().rev() {
            let (a, b) = pairs[k % pairs.len()];
            k /= pairs.len();
            left[i] = c.elems()[a].clone();
            right[i] = c.elems()[b].clone();
        }
        (left, right)
    };
    let found = (0..total)
        .into_par_iter()
        .map(|k| -> Result<Option<BasicLemma>> {
            let (left, right) = decode(k);
            let lv = prog.eval(model, &left, None)?;
            let rv = prog.eval(model, &right, None)?;
            if out_rel.contains(out_carrier.index_of(&lv)?, out_carrier.index_of(&rv)?) {
                Ok(None)
            } else {
                Ok(Some(BasicLemma::Violated { left, right, left_result: lv, right_result: rv }))
            }
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    match found {
        Some(r) => r.map(|v| v.expect("violation")),
        None => Ok(BasicLemma::Holds { checked: total }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monads::{MonadKind, MonadOptions};
    use crate::parse::parse_term;
    use crate::signature::Signature;

    fn model(kind: MonadKind) -> Model {
        Model::new(Signature::default_for(kind), MonadOptions::default()).unwrap()
    }

    #[test]
    fn bool_and_first_order_identity() {
        let m = model(MonadKind::Identity);
        let fam = RelFamily::identity(&m);
        let r = fam.lift(&m, &Type::Bool).unwrap();
        assert_eq!(r.pairs().collect::<Vec<_>>(), vec![(0, 0), (1, 1)]);
        let f = fam.lift(&m, &Type::parse("bool -> bool").unwrap()).unwrap();
        assert!(f.is_identity());
        assert_eq!(f.size(), 4);
    }

    #[test]
    fn nondet_lifting_is_set_equality() {
        let m = model(MonadKind::Nondet);
        let fam = RelFamily::identity(&m);
        let tb = Type::parse("T bool").unwrap();
        let r = fam.lift(&m, &tb).unwrap();
        let c = m.carrier(&tb).unwrap();
        // Oracle: two-sided clause over every pair of subsets.
        for (i, a) in c.elems().iter().enumerate() {
            for (j, b) in c.elems().iter().enumerate() {
                let expected = a == b;
                assert_eq!(r.contains(i, j), expected, "{a} {b}");
            }
        }
    }

    #[test]
    fn related_examples() {
        for kind in MonadKind::ALL {
            let m = model(kind);
            let fam = RelFamily::identity(&m);
            let tb = Type::parse("T bool").unwrap();
            let t = parse_term("val true", m.sig()).unwrap();
            let f = parse_term("val false", m.sig()).unwrap();
            assert!(related(&t, &t, &tb, &fam, &m).unwrap());
            assert!(!related(&t, &f, &tb, &fam, &m).unwrap());
        }
        let nd = model(MonadKind::Nondet);
        let fam = RelFamily::identity(&nd);
        let a = parse_term("or[bool](val true, val true)", nd.sig()).unwrap();
        let b = parse_term("val true", nd.sig()).unwrap();
        assert!(related(&a, &b, &Type::parse("T bool").unwrap(), &fam, &nd).unwrap());
    }

    #[test]
    fn related_rejects_wrong_type() {
        let m = model(MonadKind::Identity);
        let fam = RelFamily::identity(&m);
        let t = parse_term("true", m.sig()).unwrap();
        assert!(related(&t, &t, &Type::parse("T bool").unwrap(), &fam, &m).is_err());
    }

    #[test]
    fn basic_lemma_open_term() {
        let sig = Signature::default_for(MonadKind::Partiality).with_base("b", 2);
        let m = Model::new(sig, MonadOptions::default()).unwrap();
        let swap = Rel::from_pairs(2, [(0, 1), (1, 0)]).unwrap();
        let fam = RelFamily::identity(&m).with_base("b", swap);
        let ctx = TypeCtx::new().with("x", Type::base("b")).unwrap();
        let t = parse_term("let y <= diverge[b] in val x", m.sig()).unwrap();
        assert!(basic_lemma_check(&t, &ctx, &fam, &m).unwrap().holds());
        let t = parse_term("val (x, x)", m.sig()).unwrap();
        assert_eq!(basic_lemma_check(&t, &ctx, &fam, &m).unwrap(), BasicLemma::Holds { checked: 2 });
    }

    #[test]
    fn designated_bases_stay_identity() {
        let m = model(MonadKind::State);
        let swap = Rel::from_pairs(2, [(0, 1), (1, 0)]).unwrap();
        let fam = RelFamily::identity(&m).with_base("st", swap);
        assert!(fam.lift(&m, &Type::parse("T bool").unwrap()).is_err());
    }

    #[test]
    fn memo_coherence() {
        let m = model(MonadKind::State);
        let fam = RelFamily::identity(&m);
        let t = Type::parse("st -> T st").unwrap();
        let first = fam.lift(&m, &t).unwrap();
        fam.clear_memo();
        assert_eq!(*fam.lift(&m, &t).unwrap(), *first);
    }
}
