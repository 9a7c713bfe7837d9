//! A deliberately naive reference: raw syntax trees of a given size,
//! filtered by a small hand-written type checker, and contextual
//! equivalence by literal plugging. No memoization, no type inventory.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use mew::{Elem, Model, MonadKind, Term, Type};

pub fn ty(s: &str) -> Type {
    Type::parse(s).unwrap()
}

pub fn model(monad: MonadKind) -> Model {
    Model::new(mew::Signature::default_for(monad), mew::MonadOptions::default()).unwrap()
}

fn comp(t: &Type) -> Type {
    Type::Comp(Arc::new(t.clone()))
}

fn arrow(a: &Type, b: &Type) -> Type {
    Type::Arrow(Arc::new(a.clone()), Arc::new(b.clone()))
}

fn prod(a: &Type, b: &Type) -> Type {
    Type::Prod(Arc::new(a.clone()), Arc::new(b.clone()))
}

fn all_subtypes(t: &Type, out: &mut BTreeSet<Type>) {
    out.insert(t.clone());
    match t {
        Type::Arrow(a, b) | Type::Prod(a, b) => {
            all_subtypes(a, out);
            all_subtypes(b, out);
        }
        Type::Comp(a) => all_subtypes(a, out),
        _ => {}
    }
}

pub struct Naive<'m> {
    pub model: &'m Model,
    /// Lambda annotations and constant type arguments.
    pub universe: Vec<Type>,
    consts: Vec<(Term, Type)>,
    pub hole: Option<Type>,
}

impl<'m> Naive<'m> {
    /// `extra` joins `bool`, `T bool` and the designated bases as roots of
    /// the annotation universe. `ccall` is not supported.
    pub fn new(model: &'m Model, extra: &[Type], hole: Option<Type>) -> Naive<'m> {
        let sig = model.sig();
        let mut roots = vec![Type::Bool, comp(&Type::Bool)];
        for b in [&sig.state_base, &sig.answer_base, &sig.exception_base].into_iter().flatten() {
            roots.push(Type::Base(b.clone()));
        }
        roots.extend(extra.iter().cloned());
        let mut u = BTreeSet::new();
        for r in &roots {
            all_subtypes(r, &mut u);
        }
        let universe: Vec<Type> = u.into_iter().collect();
        let mut consts = Vec::new();
        let c = |name: &str, args: Vec<Type>| Term::Const(name.into(), args);
        let st = sig.state_base.as_ref().map(|b| Type::Base(b.clone()));
        let exns = sig.exception_base.as_ref().and_then(|b| sig.base_size(b)).unwrap_or(0);
        for a in &universe {
            let ta = comp(a);
            let binop = arrow(&prod(&ta, &ta), &ta);
            match sig.monad {
                MonadKind::Partiality => consts.push((c("diverge", vec![a.clone()]), ta.clone())),
                MonadKind::Exceptions => {
                    for e in 0..exns {
                        consts.push((c(&format!("raise_{e}"), vec![a.clone()]), ta.clone()));
                        consts.push((c(&format!("handle_{e}"), vec![a.clone()]), binop.clone()));
                    }
                }
                MonadKind::Nondet => consts.push((c("or", vec![a.clone()]), binop.clone())),
                _ => {}
            }
        }
        if let Some(st) = st {
            consts.push((c("lookup", vec![]), comp(&st)));
            consts.push((c("update", vec![]), arrow(&st, &comp(&Type::Unit))));
        }
        Naive { model, universe, consts, hole }
    }

    fn var(i: usize) -> Term {
        Term::Var(format!("x{i}").into())
    }

    /// Every raw tree of exactly `n` nodes with exactly `holes` holes, over
    /// the binders `x0..x{depth-1}`.
    pub fn raw(&self, depth: usize, n: usize, holes: usize) -> Vec<Term> {
        let mut out = Vec::new();
        if n == 0 || holes > n {
            return out;
        }
        let a = Arc::new;
        if n == 1 {
            if holes == 1 {
                if self.hole.is_some() {
                    out.push(Term::Hole);
                }
                return out;
            }
            out.extend((0..depth).map(Self::var));
            out.push(Term::UnitVal);
            out.push(Term::BoolLit(true));
            out.push(Term::BoolLit(false));
            let sig = self.model.sig();
            for b in [&sig.state_base, &sig.answer_base, &sig.exception_base].into_iter().flatten() {
                for i in 0..sig.base_size(b).unwrap() {
                    out.push(Term::Lit(b.clone(), i));
                }
            }
            out.extend(self.consts.iter().map(|(t, _)| t.clone()));
            return out;
        }
        let x: mew::Name = format!("x{depth}").into();
        for u in &self.universe {
            for b in self.raw(depth + 1, n - 1, holes) {
                out.push(Term::Lam(x.clone(), u.clone(), a(b)));
            }
        }
        for b in self.raw(depth, n - 1, holes) {
            let b = a(b);
            out.push(Term::Fst(b.clone()));
            out.push(Term::Snd(b.clone()));
            out.push(Term::Val(b));
        }
        for i in 1..n - 1 {
            let j = n - 1 - i;
            for h in 0..=holes {
                for l in self.raw(depth, i, h) {
                    let l = a(l);
                    for r in self.raw(depth, j, holes - h) {
                        let r = a(r);
                        out.push(Term::App(l.clone(), r.clone()));
                        out.push(Term::Pair(l.clone(), r.clone()));
                    }
                    for r in self.raw(depth + 1, j, holes - h) {
                        out.push(Term::LetC(x.clone(), l.clone(), a(r)));
                    }
                }
            }
        }
        for i in 1..n.saturating_sub(2) {
            for j in 1..n - 1 - i {
                let k = n - 1 - i - j;
                for hc in 0..=holes {
                    for ht in 0..=holes - hc {
                        let he = holes - hc - ht;
                        for c in self.raw(depth, i, hc) {
                            let c = a(c);
                            for t in self.raw(depth, j, ht) {
                                let t = a(t);
                                for e in self.raw(depth, k, he) {
                                    out.push(Term::If(c.clone(), t.clone(), a(e)));
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Type of `t` with binder `xi` at `scope[i]`; every subterm type is
    /// added to `seen`.
    pub fn check(&self, scope: &mut Vec<Type>, t: &Term, seen: &mut Vec<Type>) -> Option<Type> {
        let r = match t {
            Term::Var(x) => scope.get(x[1..].parse::<usize>().ok()?).cloned(),
            Term::UnitVal => Some(Type::Unit),
            Term::BoolLit(_) => Some(Type::Bool),
            Term::Lit(b, _) => Some(Type::Base(b.clone())),
            Term::Const(..) => self.consts.iter().find(|(c, _)| c == t).map(|(_, ty)| ty.clone()),
            Term::Hole => self.hole.clone(),
            Term::Lam(_, a, b) => {
                scope.push(a.clone());
                let r = self.check(scope, b, seen);
                scope.pop();
                Some(arrow(a, &r?))
            }
            Term::App(f, x) => {
                let (tf, tx) = (self.check(scope, f, seen)?, self.check(scope, x, seen)?);
                match tf {
                    Type::Arrow(d, c) if *d == tx => Some((*c).clone()),
                    _ => None,
                }
            }
            Term::Pair(l, r) => Some(prod(&self.check(scope, l, seen)?, &self.check(scope, r, seen)?)),
            Term::Fst(p) | Term::Snd(p) => match self.check(scope, p, seen)? {
                Type::Prod(l, r) => Some(if matches!(t, Term::Fst(_)) { (*l).clone() } else { (*r).clone() }),
                _ => None,
            },
            Term::If(c, a, b) => {
                let tc = self.check(scope, c, seen)?;
                let (ta, tb) = (self.check(scope, a, seen)?, self.check(scope, b, seen)?);
                (tc == Type::Bool && ta == tb).then_some(ta)
            }
            Term::Val(v) => Some(comp(&self.check(scope, v, seen)?)),
            Term::LetC(_, m, body) => match self.check(scope, m, seen)? {
                Type::Comp(a) => {
                    scope.push((*a).clone());
                    let r = self.check(scope, body, seen);
                    scope.pop();
                    r.filter(|t| matches!(t, Type::Comp(_)))
                }
                _ => None,
            },
        };
        if let Some(ty) = &r {
            seen.push(ty.clone());
        }
        r
    }

    /// Whether values of `t` stay small: function domains and computation
    /// payloads have at most 4096 elements.
    pub fn representable(&self, t: &Type) -> bool {
        let small = |t: &Type| self.model.carrier_size(t).is_ok_and(|n| n <= 4096);
        match t {
            Type::Prod(a, b) => self.representable(a) && self.representable(b),
            Type::Arrow(a, b) => small(a) && self.representable(a) && self.representable(b),
            Type::Comp(a) => {
                small(a)
                    && self.representable(a)
                    && match &self.model.sig().answer_base {
                        Some(r) if self.model.sig().monad == MonadKind::Continuation => {
                            small(&arrow(a, &Type::Base(r.clone())))
                        }
                        _ => true,
                    }
            }
            _ => true,
        }
    }

    /// Closed well-typed terms of `t` with exactly `n` nodes (and `holes`
    /// holes) whose subterm types are all representable, with those types.
    pub fn typed(&self, t: &Type, n: usize, holes: usize) -> Vec<(Term, Vec<Type>)> {
        self.raw(0, n, holes)
            .into_iter()
            .filter_map(|term| {
                let mut seen = Vec::new();
                let ty = self.check(&mut Vec::new(), &term, &mut seen)?;
                (&ty == t && seen.iter().all(|s| self.representable(s))).then_some((term, seen))
            })
            .collect()
    }

    /// The confined type space for contexts: subtypes of the universe, of
    /// the constant types, of the hole type and of `T bool`.
    pub fn context_space(&self) -> BTreeSet<Type> {
        let mut s = BTreeSet::new();
        for t in self.universe.iter().chain(self.consts.iter().map(|(_, t)| t)).chain(self.hole.iter()) {
            all_subtypes(t, &mut s);
        }
        all_subtypes(&comp(&Type::Bool), &mut s);
        s
    }

    /// Contexts of `T bool` up to `bound` nodes, optionally confined and
    /// pruned.
    pub fn contexts(&self, bound: usize, confined: bool, pruned: bool) -> Vec<Term> {
        let space = self.context_space();
        let obs = comp(&Type::Bool);
        (1..=bound)
            .flat_map(|n| self.typed(&obs, n, 1))
            .filter(|(_, seen)| !confined || seen.iter().all(|t| space.contains(t)))
            .filter(|(c, _)| !pruned || !has_covered_redex(c))
            .map(|(c, _)| c)
            .collect()
    }
}

fn occurs(t: &Term, x: &str) -> usize {
    match t {
        Term::Var(y) => usize::from(&**y == x),
        Term::Lam(_, _, b) | Term::Fst(b) | Term::Snd(b) | Term::Val(b) => occurs(b, x),
        Term::App(a, b) | Term::Pair(a, b) | Term::LetC(_, a, b) => occurs(a, x) + occurs(b, x),
        Term::If(c, a, b) => occurs(c, x) + occurs(a, x) + occurs(b, x),
        _ => 0,
    }
}

fn holey(t: &Term) -> bool {
    match t {
        Term::Hole => true,
        Term::Lam(_, _, b) | Term::Fst(b) | Term::Snd(b) | Term::Val(b) => holey(b),
        Term::App(a, b) | Term::Pair(a, b) | Term::LetC(_, a, b) => holey(a) || holey(b),
        Term::If(c, a, b) => holey(c) || holey(a) || holey(b),
        _ => false,
    }
}

/// A redex whose contraction gives a strictly smaller context with the
/// same observations.
pub fn has_covered_redex(t: &Term) -> bool {
    let here = match t {
        Term::App(f, a) => match &**f {
            Term::Lam(x, _, b) => occurs(b, x) == 1 || (occurs(b, x) == 0 && !holey(a)),
            _ => false,
        },
        Term::LetC(x, m, b) => {
            matches!(&**b, Term::Val(v) if matches!(&**v, Term::Var(y) if y == x))
                || matches!(&**m, Term::Val(v) if occurs(b, x) == 1 || (occurs(b, x) == 0 && !holey(v)))
        }
        Term::Fst(p) => matches!(&**p, Term::Pair(_, r) if !holey(r)),
        Term::Snd(p) => matches!(&**p, Term::Pair(l, _) if !holey(l)),
        Term::If(c, a, b) => match &**c {
            Term::BoolLit(true) => !holey(b),
            Term::BoolLit(false) => !holey(a),
            _ => false,
        },
        _ => false,
    };
    here || match t {
        Term::Lam(_, _, b) | Term::Fst(b) | Term::Snd(b) | Term::Val(b) => has_covered_redex(b),
        Term::App(a, b) | Term::Pair(a, b) | Term::LetC(_, a, b) => {
            has_covered_redex(a) || has_covered_redex(b)
        }
        Term::If(c, a, b) => has_covered_redex(c) || has_covered_redex(a) || has_covered_redex(b),
        _ => false,
    }
}

/// Replace the hole by `m`.
pub fn fill(c: &Term, m: &Term) -> Term {
    let a = |t: &Arc<Term>| Arc::new(fill(t, m));
    match c {
        Term::Hole => m.clone(),
        Term::Lam(x, ty, b) => Term::Lam(x.clone(), ty.clone(), a(b)),
        Term::App(f, x) => Term::App(a(f), a(x)),
        Term::Pair(l, r) => Term::Pair(a(l), a(r)),
        Term::Fst(p) => Term::Fst(a(p)),
        Term::Snd(p) => Term::Snd(a(p)),
        Term::Val(v) => Term::Val(a(v)),
        Term::LetC(x, l, r) => Term::LetC(x.clone(), a(l), a(r)),
        Term::If(i, t, e) => Term::If(a(i), a(t), a(e)),
        other => other.clone(),
    }
}

/// Naive bounded contextual equivalence of closed `m` and `n` at `t`: every
/// well-typed context up to `bound`, unpruned and unconfined, plugged
/// literally and evaluated from scratch. Returns the first distinguishing
/// context, if any.
pub fn naive_distinguish(model: &Model, m: &Term, n: &Term, t: &Type, bound: usize) -> Option<Term> {
    let naive = Naive::new(model, std::slice::from_ref(t), Some(t.clone()));
    let obs = comp(&Type::Bool);
    for size in 1..=bound {
        for (c, _) in naive.typed(&obs, size, 1) {
            let l: Elem = model.eval_closed(&fill(&c, m)).unwrap();
            let r: Elem = model.eval_closed(&fill(&c, n)).unwrap();
            if l != r {
                return Some(c);
            }
        }
    }
    None
}
