//! Definable denotations beyond the reach of plain term enumeration.
//!
//! Small closed terms are enumerated syntactically; larger ones are built
//! by combining the smallest known representative of each denotation with
//! the closed term formers, constant functions and functions on `bool` by
//! case analysis.
//! Every representative is an actual closed term,
//! so every reported denotation is definable. Sizes are upper bounds on the
//! true minimum once the syntactic seed bound is exceeded.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::enumerate::{type_universe, Enumerator};
use crate::error::Result;
use crate::semantics::{Elem, Model};
use crate::syntax::{Name, Term, Type};

/// A closed term standing for its denotation.
#[derive(Clone, Debug)]
pub struct Rep {
    pub term: Arc<Term>,
    pub size: usize,
}

/// Representatives per type, keyed by denotation.
#[derive(Clone, Debug, Default)]
pub struct Definable {
    pub reps: BTreeMap<Type, BTreeMap<Elem, Rep>>,
}

impl Definable {
    /// Denotations of type `t` with representatives, in carrier order.
    pub fn at(&self, t: &Type) -> Vec<(Elem, Rep)> {
        self.reps
            .get(t)
            .map(|m| m.iter().map(|(e, r)| (e.clone(), r.clone())).collect())
            .unwrap_or_default()
    }
}

/// Types the search works over: subtypes of `targets`, of the annotation
/// universe and of the constant types.
pub fn search_space(model: &Model, targets: &[Type]) -> BTreeSet<Type> {
    let e = Enumerator::new(model, type_universe(model, targets)).confined(targets);
    e.space().cloned().unwrap_or_default()
}

/// Search for definable denotations at every type of `space`: all closed
/// terms up to `seed_bound` nodes, then compositions up to `max_size`.
pub fn definable(
    model: &Model,
    targets: &[Type],
    seed_bound: usize,
    max_size: usize,
) -> Result<Definable> {
    let space: Vec<Type> = search_space(model, targets).into_iter().collect();
    let mut enumerator = Enumerator::new(model, type_universe(model, targets));
    let mut found: Definable = Definable::default();
    // New denotations first reached at each size, per type.
    let mut layers: Vec<Vec<(Type, Elem, Arc<Term>)>> = vec![Vec::new(); max_size + 1];
    let x: Name = "x0".into();
    for n in 1..=max_size {
        let mut fresh: Vec<(Type, Arc<Term>)> = Vec::new();
        if n <= seed_bound {
            for t in &space {
                for term in enumerator.generate(&[], t, n, false).iter() {
                    fresh.push((t.clone(), term.clone()));
                }
            }
        } else {
            let of = |layers: &Vec<Vec<(Type, Elem, Arc<Term>)>>, k: usize, t: &Type| -> Vec<Arc<Term>> {
                layers[k].iter().filter(|(u, _, _)| u == t).map(|(_, _, m)| m.clone()).collect()
            };
            for t in &space {
                // Application of a closed function.
                for i in 1..n - 1 {
                    let j = n - 1 - i;
                    for s in &space {
                        let f_ty = Type::arrow(s.clone(), t.clone());
                        if !space.contains(&f_ty) {
                            continue;
                        }
                        let fs = of(&layers, i, &f_ty);
                        if fs.is_empty() {
                            continue;
                        }
                        let args = of(&layers, j, s);
                        for f in &fs {
                            for a in &args {
                                fresh.push((t.clone(), Arc::new(Term::App(f.clone(), a.clone()))));
                            }
                        }
                    }
                }
                match t {
                    Type::Prod(l, r) => {
                        for i in 1..n - 1 {
                            let (ls, rs) = (of(&layers, i, l), of(&layers, n - 1 - i, r));
                            for a in &ls {
                                for b in &rs {
                                    fresh.push((t.clone(), Arc::new(Term::Pair(a.clone(), b.clone()))));
                                }
                            }
                        }
                    }
                    Type::Comp(a) => {
                        for v in of(&layers, n - 1, a) {
                            fresh.push((t.clone(), Arc::new(Term::Val(v))));
                        }
                        // let x0 <= m in f x0, for a closed f.
                        for i in 1..n - 3 {
                            let j = n - 3 - i;
                            for s in &space {
                                let ms = of(&layers, i, &Type::comp(s.clone()));
                                if ms.is_empty() {
                                    continue;
                                }
                                let fs = of(&layers, j, &Type::arrow(s.clone(), t.clone()));
                                for m in &ms {
                                    for f in &fs {
                                        let body = Term::App(f.clone(), Arc::new(Term::Var(x.clone())));
                                        fresh.push((
                                            t.clone(),
                                            Arc::new(Term::LetC(x.clone(), m.clone(), Arc::new(body))),
                                        ));
                                    }
                                }
                            }
                        }
                    }
                    Type::Arrow(d, r) => {
                        for a in of(&layers, n - 1, r) {
                            fresh.push((t.clone(), Arc::new(Term::Lam(x.clone(), (**d).clone(), a))));
                        }
                        if **d == Type::Bool {
                            // \x0:bool. if x0 then a else b, for closed a and b.
                            for i in 1..n.saturating_sub(3) {
                                let j = n - 3 - i;
                                let (ts, es) = (of(&layers, i, r), of(&layers, j, r));
                                for a in &ts {
                                    for b in &es {
                                        let body = Term::If(Arc::new(Term::Var(x.clone())), a.clone(), b.clone());
                                        fresh.push((t.clone(), Arc::new(Term::Lam(x.clone(), Type::Bool, Arc::new(body)))));
                                    }
                                }
                            }
                        }
                    }
                    _ => {}
                }
                for p in &space {
                    if let Type::Prod(l, r) = p {
                        for m in of(&layers, n - 1, p) {
                            if **l == *t {
                                fresh.push((t.clone(), Arc::new(Term::Fst(m.clone()))));
                            }
                            if **r == *t {
                                fresh.push((t.clone(), Arc::new(Term::Snd(m))));
                            }
                        }
                    }
                }
                for i in 1..n.saturating_sub(2) {
                    for j in 1..n - 1 - i {
                        let k = n - 1 - i - j;
                        let cs = of(&layers, i, &Type::Bool);
                        let (ts, es) = (of(&layers, j, t), of(&layers, k, t));
                        for c in &cs {
                            for a in &ts {
                                for b in &es {
                                    fresh.push((
                                        t.clone(),
                                        Arc::new(Term::If(c.clone(), a.clone(), b.clone())),
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
        for (t, term) in fresh {
            let (ty, v) = model.denote(&term)?;
            debug_assert_eq!(ty, t);
            let slot = found.reps.entry(t.clone()).or_default();
            if !slot.contains_key(&v) {
                slot.insert(v.clone(), Rep { term: term.clone(), size: n });
                layers[n].push((t, v, term));
            }
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monads::{MonadKind, MonadOptions};
    use crate::signature::Signature;

    #[test]
    fn nondet_nested_sets() {
        let m = Model::new(Signature::default_for(MonadKind::Nondet), MonadOptions::default())
            .unwrap();
        let tt = Type::parse("T (T bool)").unwrap();
        let d = definable(&m, &[tt.clone()], 5, 14).unwrap();
        let at = d.at(&tt);
        for (e, r) in &at {
            assert_eq!(&m.eval_closed(&r.term).unwrap(), e);
            assert_eq!(r.term.size(), r.size);
        }
        let shown: Vec<String> = at.iter().map(|(e, r)| format!("{e}@{}", r.size)).collect();
        assert_eq!(
            shown,
            [
                "{{false}}@3",
                "{{false},{false,true}}@14",
                "{{false},{true}}@9",
                "{{false,true}}@8",
                "{{false,true},{true}}@14",
                "{{true}}@3",
            ]
        );
    }
}
