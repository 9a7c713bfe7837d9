//! The enumerators and the context oracle against the naive reference.

mod common;

use std::collections::HashSet;

use common::{model, naive_distinguish, ty, Naive};
use mew::{enumerate_contexts, enumerate_terms, ContextSuite, MonadKind, Term};

#[test]
fn term_enumeration_matches_raw_grammar() {
    for (monad, t, bound) in [
        (MonadKind::Identity, "bool -> bool", 6),
        (MonadKind::Partiality, "T bool", 5),
        (MonadKind::Exceptions, "T bool", 5),
        (MonadKind::State, "T bool", 5),
        (MonadKind::Nondet, "bool -> T bool", 5),
    ] {
        let m = model(monad);
        let t = ty(t);
        let fast: Vec<Term> = enumerate_terms(&t, bound, &m).unwrap();
        let naive = Naive::new(&m, std::slice::from_ref(&t), None);
        let slow: Vec<Term> = (1..=bound).flat_map(|n| naive.typed(&t, n, 0)).map(|(x, _)| x).collect();
        let fast_set: HashSet<&Term> = fast.iter().collect();
        assert_eq!(fast_set.len(), fast.len(), "{monad} {t}: duplicates");
        let slow_set: HashSet<&Term> = slow.iter().collect();
        let extra: Vec<_> = fast_set.difference(&slow_set).take(5).collect();
        let missing: Vec<_> = slow_set.difference(&fast_set).take(5).collect();
        assert!(extra.is_empty() && missing.is_empty(), "{monad} {t}: extra {extra:?} missing {missing:?}");
    }
}

#[test]
fn context_count_at_bound_four() {
    let m = model(MonadKind::Identity);
    let hole = ty("bool");
    let naive = Naive::new(&m, std::slice::from_ref(&hole), Some(hole.clone()));
    let pruned: HashSet<Term> = naive.contexts(4, true, true).into_iter().collect();
    let fast: HashSet<Term> =
        enumerate_contexts(&hole, 4, &m).unwrap().into_iter().map(|c| (*c.body).clone()).collect();
    assert_eq!(fast, pruned);
    let unpruned: HashSet<Term> = naive.contexts(4, true, false).into_iter().collect();
    let suite = ContextSuite::unpruned(&m, &hole, 4).unwrap();
    let all: HashSet<Term> = suite.contexts().iter().map(|c| (*c.body).clone()).collect();
    assert_eq!(all, unpruned);
    assert!(fast.len() <= all.len());
}

#[test]
fn pruned_contexts_per_monad() {
    for monad in MonadKind::ALL {
        if monad == MonadKind::Continuation {
            continue;
        }
        let m = model(monad);
        let hole = ty("T bool");
        let naive = Naive::new(&m, std::slice::from_ref(&hole), Some(hole.clone()));
        let slow: HashSet<Term> = naive.contexts(4, true, true).into_iter().collect();
        let fast: HashSet<Term> =
            enumerate_contexts(&hole, 4, &m).unwrap().into_iter().map(|c| (*c.body).clone()).collect();
        assert_eq!(fast, slow, "{monad}");
    }
}

#[test]
fn exceptions_raise_against_handled_value() {
    // raise_0 and a handled raise are told apart only through a handler.
    let m = model(MonadKind::Exceptions);
    let t = ty("T bool");
    let sig = m.sig();
    let a = mew::parse_term("raise_0[bool]", sig).unwrap();
    let b = mew::parse_term("handle_0[bool] (raise_0[bool], raise_0[bool])", sig).unwrap();
    for bound in 1..=5 {
        let fast = mew::ctx_equiv(&a, &b, &t, bound, &m).unwrap();
        assert!(fast.is_equivalent());
        assert!(naive_distinguish(&m, &a, &b, &t, bound).is_none());
    }
    let c = mew::parse_term("val true", sig).unwrap();
    for bound in 1..=5 {
        let fast = mew::ctx_equiv(&a, &c, &t, bound, &m).unwrap();
        assert_eq!(fast.is_equivalent(), naive_distinguish(&m, &a, &c, &t, bound).is_none());
    }
}
