//! Typed enumeration of closed terms and one-hole contexts by size.
//!
//! Terms are produced top-down by type. Binders are named `x0`, `x1`, ...
//! after their depth, so no two enumerated terms are alpha-equivalent.
//! Lambda annotations and constant type arguments range over a finite type
//! universe; the types of other hidden positions (an argument, a sequenced
//! computation, the discarded half of a projection) come from an inventory
//! of the types inhabited at each size, computed on types alone.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::Result;
use crate::monads::{ConstKind, MonadKind};
use crate::semantics::Model;
use crate::syntax::{Context, Name, Term, Type};

/// Carrier limit for every type that may occur inside an enumerated term.
pub const DEFAULT_TYPE_BUDGET: u128 = 1 << 12;

/// The type universe used for annotations and constant type arguments:
/// the subtypes of `bool`, `T bool`, the designated bases and `extra`.
pub fn type_universe(model: &Model, extra: &[Type]) -> Vec<Type> {
    let mut seeds = vec![Type::Bool, Type::comp(Type::Bool)];
    seeds.extend(model.sig().designated().into_iter().map(Type::Base));
    if model.monad().kind == MonadKind::Continuation && model.options().ccall {
        seeds.push(Type::arrow(Type::Bool, Type::comp(Type::Bool)));
    }
    seeds.extend(extra.iter().cloned());
    let mut all = BTreeSet::new();
    for s in &seeds {
        s.subtypes(&mut all);
    }
    all.into_iter().collect()
}

type Key = (Vec<Type>, usize, bool);
type Terms = Arc<Vec<Arc<Term>>>;

/// A memoizing enumerator over one model.
pub struct Enumerator<'m> {
    model: &'m Model,
    universe: Vec<Type>,
    hole: Option<Type>,
    prune: bool,
    type_budget: u128,
    /// Constants usable anywhere, as size-one terms.
    consts: Vec<(Arc<Term>, Type)>,
    /// Unary constants whose table cannot be materialized; they only occur
    /// applied.
    applied_only: Vec<(Arc<Term>, Type, Type)>,
    usable: HashMap<Type, bool>,
    /// When set, every subterm's type must lie in this set.
    space: Option<BTreeSet<Type>>,
    inh: HashMap<Key, Arc<BTreeSet<Type>>>,
    gen: HashMap<(Vec<Type>, Type, usize, bool), Terms>,
}

fn splits2(h: bool) -> &'static [(bool, bool)] {
    if h {
        &[(true, false), (false, true)]
    } else {
        &[(false, false)]
    }
}

fn splits3(h: bool) -> &'static [(bool, bool, bool)] {
    if h {
        &[(true, false, false), (false, true, false), (false, false, true)]
    } else {
        &[(false, false, false)]
    }
}

fn var_name(i: usize) -> Name {
    format!("x{i}").into()
}

impl<'m> Enumerator<'m> {
    pub fn new(model: &'m Model, universe: Vec<Type>) -> Enumerator<'m> {
        let mut e = Enumerator {
            model,
            universe: Vec::new(),
            hole: None,
            prune: false,
            type_budget: DEFAULT_TYPE_BUDGET.min(model.budget() as u128),
            consts: Vec::new(),
            applied_only: Vec::new(),
            usable: HashMap::new(),
            space: None,
            inh: HashMap::new(),
            gen: HashMap::new(),
        };
        e.universe = universe
            .into_iter()
            .filter(|t| e.is_usable(t) && e.fits(t))
            .collect();
        for (k, args) in ConstKind::instances(model.monad(), &e.universe) {
            let Ok(ty) = k.type_of(&args, model.sig()) else { continue };
            let term = Arc::new(Term::Const(k.name().into(), args));
            if e.is_usable(&ty) {
                e.consts.push((term, ty));
            } else if let Type::Arrow(d, c) = &ty {
                if k.is_unary() && e.is_usable(d) && e.is_usable(c) {
                    e.applied_only.push((term, (**d).clone(), (**c).clone()));
                }
            }
        }
        e
    }

    /// Enumerate contexts whose single hole has type `t`.
    pub fn with_hole(mut self, t: Type) -> Enumerator<'m> {
        self.hole = Some(t);
        self.inh.clear();
        self.gen.clear();
        self
    }

    /// Confine every subterm to the subtypes of the universe, the constant
    /// types, the hole type and `extra`.
    pub fn confined(mut self, extra: &[Type]) -> Enumerator<'m> {
        let mut space = BTreeSet::new();
        let roots = self
            .universe
            .iter()
            .chain(self.consts.iter().map(|(_, t)| t))
            .chain(self.hole.iter())
            .chain(extra);
        for t in roots {
            t.subtypes(&mut space);
        }
        for (_, d, c) in &self.applied_only {
            d.subtypes(&mut space);
            c.subtypes(&mut space);
        }
        self.space = Some(space);
        self.inh.clear();
        self.gen.clear();
        self
    }

    pub fn space(&self) -> Option<&BTreeSet<Type>> {
        self.space.as_ref()
    }

    /// Skip contexts that contain a redex some smaller context covers.
    pub fn pruned(mut self, on: bool) -> Enumerator<'m> {
        self.prune = on;
        self.gen.clear();
        self
    }

    pub fn universe(&self) -> &[Type] {
        &self.universe
    }

    fn fits(&self, t: &Type) -> bool {
        self.model.carrier_size(t).is_ok_and(|n| n <= self.type_budget)
    }

    /// Whether values of `t` can be represented and computed with: every
    /// function domain and every computation payload has a small carrier.
    pub fn is_usable(&mut self, t: &Type) -> bool {
        if let Some(&u) = self.usable.get(t) {
            return u;
        }
        let u = match t {
            Type::Unit | Type::Bool | Type::Base(_) => true,
            Type::Prod(a, b) => self.is_usable(a) && self.is_usable(b),
            Type::Arrow(a, b) => self.fits(a) && self.is_usable(a) && self.is_usable(b),
            Type::Comp(a) => {
                self.fits(a)
                    && self.is_usable(a)
                    && match self.model.monad().answer_type() {
                        Some(r) if self.model.monad().kind == MonadKind::Continuation => {
                            self.fits(&Type::arrow((**a).clone(), r))
                        }
                        _ => true,
                    }
            }
        };
        self.usable.insert(t.clone(), u);
        u
    }

    fn leaf_types(&self, ctx: &[Type], hole: bool) -> BTreeSet<Type> {
        let mut out = BTreeSet::new();
        if hole {
            out.extend(self.hole.clone());
            return out;
        }
        out.extend(ctx.iter().cloned());
        out.insert(Type::Unit);
        out.insert(Type::Bool);
        for b in self.model.sig().designated() {
            out.insert(Type::Base(b));
        }
        out.extend(self.consts.iter().map(|(_, t)| t.clone()));
        out
    }

    /// Types inhabited by terms of exactly size `n` in `ctx`.
    fn inhabited(&mut self, ctx: &[Type], n: usize, hole: bool) -> Arc<BTreeSet<Type>> {
        // Only the set of types in scope matters here.
        if !ctx.windows(2).all(|w| w[0] < w[1]) {
            let mut set = ctx.to_vec();
            set.sort();
            set.dedup();
            return self.inhabited(&set, n, hole);
        }
        let key = (ctx.to_vec(), n, hole);
        if let Some(r) = self.inh.get(&key) {
            return r.clone();
        }
        let mut out = BTreeSet::new();
        if hole && self.hole.is_none() {
            // nothing
        } else if n == 1 {
            out = self.leaf_types(ctx, hole);
        } else {
            for a in self.universe.clone() {
                let mut inner = ctx.to_vec();
                inner.push(a.clone());
                for b in self.inhabited(&inner, n - 1, hole).iter() {
                    out.insert(Type::arrow(a.clone(), b.clone()));
                }
            }
            for i in 1..n - 1 {
                let j = n - 1 - i;
                for &(hf, ha) in splits2(hole) {
                    let fs = self.inhabited(ctx, i, hf);
                    let args = self.inhabited(ctx, j, ha);
                    for f in fs.iter() {
                        if let Type::Arrow(d, c) = f {
                            if args.contains(&**d) {
                                out.insert((**c).clone());
                            }
                        }
                    }
                    if i == 1 && !hf {
                        for (_, d, c) in &self.applied_only {
                            if args.contains(d) {
                                out.insert(c.clone());
                            }
                        }
                    }
                    let ls = self.inhabited(ctx, i, hf);
                    let rs = self.inhabited(ctx, j, ha);
                    for l in ls.iter() {
                        for r in rs.iter() {
                            out.insert(Type::prod(l.clone(), r.clone()));
                        }
                    }
                }
            }
            for p in self.inhabited(ctx, n - 1, hole).iter() {
                if let Type::Prod(l, r) = p {
                    out.insert((**l).clone());
                    out.insert((**r).clone());
                }
            }
            for i in 1..n - 2 {
                for j in 1..n - 1 - i {
                    let k = n - 1 - i - j;
                    for &(hc, ht, he) in splits3(hole) {
                        if !self.inhabited(ctx, i, hc).contains(&Type::Bool) {
                            continue;
                        }
                        let ts = self.inhabited(ctx, j, ht);
                        let es = self.inhabited(ctx, k, he);
                        out.extend(ts.intersection(&es).cloned());
                    }
                }
            }
            for a in self.inhabited(ctx, n - 1, hole).iter() {
                let t = Type::comp(a.clone());
                if self.is_usable(&t) {
                    out.insert(t);
                }
            }
            for i in 1..n - 1 {
                let j = n - 1 - i;
                for &(hm, hn) in splits2(hole) {
                    for m in self.inhabited(ctx, i, hm).iter() {
                        if let Type::Comp(s) = m {
                            let mut inner = ctx.to_vec();
                            inner.push((**s).clone());
                            for b in self.inhabited(&inner, j, hn).iter() {
                                if matches!(b, Type::Comp(_)) {
                                    out.insert(b.clone());
                                }
                            }
                        }
                    }
                }
            }
        }
        if let Some(space) = &self.space {
            out.retain(|t| space.contains(t));
        }
        let r = Arc::new(out);
        self.inh.insert(key, r.clone());
        r
    }

    /// Terms of type `t` and exactly size `n` in `ctx`; with `hole` set they
    /// contain exactly one hole, otherwise none.
    pub fn generate(&mut self, ctx: &[Type], t: &Type, n: usize, hole: bool) -> Terms {
        if n == 0 || !self.inhabited(ctx, n, hole).contains(t) {
            return Arc::default();
        }
        let key = (ctx.to_vec(), t.clone(), n, hole);
        if let Some(r) = self.gen.get(&key) {
            return r.clone();
        }
        let r = Arc::new(self.generate_uncached(ctx, t, n, hole));
        self.gen.insert(key, r.clone());
        r
    }

    fn generate_uncached(&mut self, ctx: &[Type], t: &Type, n: usize, hole: bool) -> Vec<Arc<Term>> {
        let mut out: Vec<Arc<Term>> = Vec::new();
        if n == 0 || (hole && self.hole.is_none()) || !self.inhabited(ctx, n, hole).contains(t) {
            return out;
        }
        let prune = self.prune;
        if n == 1 {
            if hole {
                out.push(Arc::new(Term::Hole));
                return out;
            }
            for (i, ty) in ctx.iter().enumerate() {
                if ty == t {
                    out.push(Arc::new(Term::Var(var_name(i))));
                }
            }
            match t {
                Type::Unit => out.push(Arc::new(Term::UnitVal)),
                Type::Bool => {
                    out.push(Arc::new(Term::BoolLit(true)));
                    out.push(Arc::new(Term::BoolLit(false)));
                }
                Type::Base(b) if self.model.sig().is_designated(b) => {
                    let k = self.model.sig().base_size(b).unwrap_or(0);
                    out.extend((0..k).map(|i| Arc::new(Term::Lit(b.clone(), i))));
                }
                _ => {}
            }
            for (c, ty) in &self.consts {
                if ty == t {
                    out.push(c.clone());
                }
            }
            return out;
        }
        let depth = ctx.len();
        // Lambda.
        if let Type::Arrow(a, b) = t {
            if self.universe.contains(a) {
                let mut inner = ctx.to_vec();
                inner.push((**a).clone());
                let x = var_name(depth);
                for body in self.generate(&inner, b, n - 1, hole).iter() {
                    out.push(Arc::new(Term::Lam(x.clone(), (**a).clone(), body.clone())));
                }
            }
        }
        // Application.
        for i in 1..n - 1 {
            let j = n - 1 - i;
            for &(hf, ha) in splits2(hole) {
                let args = self.inhabited(ctx, j, ha);
                let funs = self.inhabited(ctx, i, hf);
                for s in args.iter() {
                    let fty = Type::arrow(s.clone(), t.clone());
                    let mut fs: Vec<Arc<Term>> = if funs.contains(&fty) {
                        self.generate(ctx, &fty, i, hf).to_vec()
                    } else {
                        Vec::new()
                    };
                    if i == 1 && !hf {
                        fs.extend(
                            self.applied_only
                                .iter()
                                .filter(|(_, d, c)| d == s && c == t)
                                .map(|(c, _, _)| c.clone()),
                        );
                    }
                    if fs.is_empty() {
                        continue;
                    }
                    let xs = self.generate(ctx, s, j, ha);
                    for f in &fs {
                        for a in xs.iter() {
                            if prune && redundant_beta(f, a) {
                                continue;
                            }
                            out.push(Arc::new(Term::App(f.clone(), a.clone())));
                        }
                    }
                }
            }
        }
        // Pair.
        if let Type::Prod(l, r) = t {
            for i in 1..n - 1 {
                let j = n - 1 - i;
                for &(hl, hr) in splits2(hole) {
                    let ls = self.generate(ctx, l, i, hl);
                    let rs = self.generate(ctx, r, j, hr);
                    for a in ls.iter() {
                        for b in rs.iter() {
                            out.push(Arc::new(Term::Pair(a.clone(), b.clone())));
                        }
                    }
                }
            }
        }
        // Projections.
        for left in [true, false] {
            let inner = self.inhabited(ctx, n - 1, hole);
            let others: Vec<Type> = inner
                .iter()
                .filter_map(|p| match p {
                    Type::Prod(l, r) if left && **l == *t => Some((**r).clone()),
                    Type::Prod(l, r) if !left && **r == *t => Some((**l).clone()),
                    _ => None,
                })
                .collect();
            for o in others {
                let pty = if left { Type::prod(t.clone(), o) } else { Type::prod(o, t.clone()) };
                for p in self.generate(ctx, &pty, n - 1, hole).iter() {
                    if prune {
                        if let Term::Pair(a, b) = &**p {
                            let dropped = if left { b } else { a };
                            if !dropped.has_hole() {
                                continue;
                            }
                        }
                    }
                    out.push(Arc::new(if left { Term::Fst(p.clone()) } else { Term::Snd(p.clone()) }));
                }
            }
        }
        // Conditional.
        for i in 1..n.saturating_sub(2) {
            for j in 1..n - 1 - i {
                let k = n - 1 - i - j;
                for &(hc, ht, he) in splits3(hole) {
                    let cs = self.generate(ctx, &Type::Bool, i, hc);
                    if cs.is_empty() {
                        continue;
                    }
                    let ts = self.generate(ctx, t, j, ht);
                    let es = self.generate(ctx, t, k, he);
                    for c in cs.iter() {
                        for a in ts.iter() {
                            for b in es.iter() {
                                if prune {
                                    match &**c {
                                        Term::BoolLit(true) if !b.has_hole() => continue,
                                        Term::BoolLit(false) if !a.has_hole() => continue,
                                        _ => {}
                                    }
                                }
                                out.push(Arc::new(Term::If(c.clone(), a.clone(), b.clone())));
                            }
                        }
                    }
                }
            }
        }
        if let Type::Comp(a) = t {
            // Unit.
            for v in self.generate(ctx, a, n - 1, hole).iter() {
                out.push(Arc::new(Term::Val(v.clone())));
            }
            // Sequencing.
            let x = var_name(depth);
            for i in 1..n - 1 {
                let j = n - 1 - i;
                for &(hm, hn) in splits2(hole) {
                    let bound = self.inhabited(ctx, i, hm);
                    for m in bound.iter() {
                        let Type::Comp(s) = m else { continue };
                        let mut inner = ctx.to_vec();
                        inner.push((**s).clone());
                        let bodies = self.generate(&inner, t, j, hn);
                        if bodies.is_empty() {
                            continue;
                        }
                        let ms = self.generate(ctx, m, i, hm);
                        for mt in ms.iter() {
                            for body in bodies.iter() {
                                if prune && redundant_let(&x, mt, body) {
                                    continue;
                                }
                                out.push(Arc::new(Term::LetC(x.clone(), mt.clone(), body.clone())));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Closed hole-free terms of type `t` up to size `bound`, smallest first.
    pub fn terms(&mut self, t: &Type, bound: usize) -> Vec<Arc<Term>> {
        (1..=bound).flat_map(|n| self.generate(&[], t, n, false).to_vec()).collect()
    }

    /// Closed contexts of result type `t` up to size `bound`, smallest first.
    pub fn contexts(&mut self, t: &Type, bound: usize) -> Vec<Arc<Term>> {
        (1..=bound).flat_map(|n| self.generate(&[], t, n, true).to_vec()).collect()
    }
}

/// `(\x. M) N` where substituting gives a strictly smaller context.
fn redundant_beta(f: &Term, a: &Term) -> bool {
    match f {
        Term::Lam(x, _, body) => match body.occurrences(x) {
            1 => true,
            0 => !a.has_hole(),
            _ => false,
        },
        _ => false,
    }
}

fn redundant_let(x: &Name, m: &Term, body: &Term) -> bool {
    if let Term::Val(v) = body {
        if matches!(&**v, Term::Var(y) if y == x) {
            return true;
        }
    }
    match m {
        Term::Val(v) => match body.occurrences(x) {
            1 => true,
            0 => !v.has_hole(),
            _ => false,
        },
        _ => false,
    }
}

/// All closed well-typed terms of type `t` with at most `bound` nodes.
pub fn enumerate_terms(t: &Type, bound: usize, model: &Model) -> Result<Vec<Term>> {
    model.sig().check_type(t)?;
    let mut e = Enumerator::new(model, type_universe(model, std::slice::from_ref(t)));
    Ok(e.terms(t, bound).into_iter().map(|t| (*t).clone()).collect())
}

/// All contexts of result type `T bool` with a hole of type `hole`.
pub fn enumerate_contexts(hole: &Type, bound: usize, model: &Model) -> Result<Vec<Context>> {
    model.sig().check_type(hole)?;
    let obs = Type::comp(Type::Bool);
    let mut e = Enumerator::new(model, type_universe(model, std::slice::from_ref(hole)))
        .with_hole(hole.clone())
        .pruned(true)
        .confined(std::slice::from_ref(&obs));
    e.contexts(&obs, bound)
        .into_iter()
        .map(|b| Context::new((*b).clone(), hole.clone(), obs.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monads::MonadOptions;
    use crate::signature::Signature;
    use crate::typing::{check_context, infer, TypeCtx};

    fn model(kind: MonadKind) -> Model {
        Model::new(Signature::default_for(kind), MonadOptions::default()).unwrap()
    }

    #[test]
    fn bool_size_one() {
        let m = model(MonadKind::Identity);
        let ts = enumerate_terms(&Type::Bool, 1, &m).unwrap();
        let shown: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
        assert_eq!(shown, ["true", "false"]);
    }

    #[test]
    fn val_terms_present() {
        let m = model(MonadKind::Identity);
        let ts = enumerate_terms(&Type::parse("T bool").unwrap(), 2, &m).unwrap();
        let shown: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
        assert!(shown.contains(&"(val true)".to_string()));
        assert!(shown.contains(&"(val false)".to_string()));
    }

    #[test]
    fn all_terms_typecheck_and_are_distinct() {
        for kind in MonadKind::ALL {
            let m = model(kind);
            for ty in ["bool", "T bool", "bool -> T bool"] {
                let ty = Type::parse(ty).unwrap();
                let ts = enumerate_terms(&ty, 5, &m).unwrap();
                let mut seen = std::collections::HashSet::new();
                for t in &ts {
                    assert_eq!(infer(&TypeCtx::new(), t, m.sig()).unwrap(), ty, "{t}");
                    assert!(t.size() <= 5);
                    assert!(seen.insert(t.to_nameless()), "duplicate {t}");
                    m.eval_closed(t).unwrap();
                }
            }
        }
    }

    #[test]
    fn contexts_include_basic_shapes() {
        let m = model(MonadKind::Identity);
        let cs = enumerate_contexts(&Type::Bool, 3, &m).unwrap();
        assert!(cs.iter().any(|c| c.body.to_string() == "(val _)"));
        let cs = enumerate_contexts(&Type::parse("T bool").unwrap(), 4, &m).unwrap();
        assert!(cs.iter().any(|c| c.body.to_string() == "_"));
        for c in &cs {
            let (h, r) = check_context(c, m.sig()).unwrap();
            assert_eq!(h.to_string(), "T bool");
            assert_eq!(r.to_string(), "T bool");
        }
    }

    #[test]
    fn unpruned_contexts_include_identity_let() {
        let m = model(MonadKind::State);
        let tb = Type::parse("T bool").unwrap();
        let mut e = Enumerator::new(&m, type_universe(&m, &[tb.clone()])).with_hole(tb.clone());
        let cs = e.contexts(&tb, 4);
        assert!(cs.iter().any(|c| c.to_string() == "(let x0 <= _ in (val x0))"));
    }

    #[test]
    fn ccall_only_applied() {
        let sig = Signature::default_for(MonadKind::Continuation);
        let m = Model::new(sig, MonadOptions { ccall: true, ..Default::default() }).unwrap();
        let ts = enumerate_terms(&Type::parse("T bool").unwrap(), 6, &m).unwrap();
        let shown: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
        assert!(shown.contains(&"(ccall[bool, bool] (\\x0:bool -> T bool. (x0 true)))".to_string()));
        for t in &ts {
            m.eval_closed(t).unwrap();
        }
    }
}
