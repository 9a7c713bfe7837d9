mod common;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use common::{fill, model, ty};
use mew::parse::parse_term_unchecked;
use mew::{ctx_equiv, enumerate_terms, infer, parse_term, ContextSuite, MonadKind, Term, Type, TypeCtx};
use proptest::prelude::*;

/// Enumerated terms, computed once per monad, type and bound.
fn terms(k: MonadKind, t: &str, bound: usize) -> Arc<Vec<Term>> {
    static CACHE: OnceLock<Mutex<HashMap<(MonadKind, String, usize), Arc<Vec<Term>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (k, t.to_string(), bound);
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return v.clone();
    }
    let v = Arc::new(enumerate_terms(&ty(t), bound, &model(k)).unwrap());
    cache.lock().unwrap().insert(key, v.clone());
    v
}

fn monad() -> impl Strategy<Value = MonadKind> {
    prop::sample::select(MonadKind::ALL.to_vec())
}

fn type_strategy() -> impl Strategy<Value = Type> {
    let leaf = prop_oneof![Just(Type::Unit), Just(Type::Bool), Just(Type::base("b"))];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Type::arrow(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Type::prod(a, b)),
            inner.prop_map(Type::comp),
        ]
    })
}

/// Raw terms, not necessarily well-typed.
fn term_strategy() -> impl Strategy<Value = Term> {
    let names = prop::sample::select(vec!["x", "y", "k0"]);
    let leaf = prop_oneof![
        names.clone().prop_map(Term::var),
        Just(Term::UnitVal),
        any::<bool>().prop_map(Term::BoolLit),
        (0u32..3).prop_map(|i| Term::Lit("st".into(), i)),
        type_strategy().prop_map(|t| Term::constant("diverge", vec![t])),
        Just(Term::constant("lookup", vec![])),
    ];
    leaf.prop_recursive(5, 40, 3, move |inner| {
        let a = Arc::new;
        prop_oneof![
            (names.clone(), type_strategy(), inner.clone())
                .prop_map(move |(x, t, b)| Term::Lam(x.into(), t, a(b))),
            (inner.clone(), inner.clone()).prop_map(move |(f, x)| Term::App(a(f), a(x))),
            (inner.clone(), inner.clone()).prop_map(move |(l, r)| Term::Pair(a(l), a(r))),
            inner.clone().prop_map(move |p| Term::Fst(a(p))),
            inner.clone().prop_map(move |p| Term::Snd(a(p))),
            inner.clone().prop_map(move |v| Term::Val(a(v))),
            (inner.clone(), inner.clone(), inner.clone())
                .prop_map(move |(c, t, e)| Term::If(a(c), a(t), a(e))),
            (names.clone(), inner.clone(), inner.clone())
                .prop_map(move |(x, m, n)| Term::LetC(x.into(), a(m), a(n))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_parse_round_trip(t in term_strategy()) {
        let printed = t.to_string();
        let back = parse_term_unchecked(&printed).unwrap();
        prop_assert_eq!(&back, &t, "{}", printed);
    }

    #[test]
    fn type_print_parse_round_trip(t in type_strategy()) {
        prop_assert_eq!(Type::parse(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn alpha_renaming_is_invisible(seed in 0usize..400) {
        let m = model(MonadKind::State);
        let terms = terms(MonadKind::State, "st -> T st", 6);
        let t = &terms[seed % terms.len()];
        let renamed = parse_term(&t.to_string().replace("x0", "fresh"), m.sig()).unwrap();
        prop_assert!(renamed.alpha_eq(t));
        prop_assert_eq!(m.eval_closed(&renamed).unwrap(), m.eval_closed(t).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Evaluated denotations lie in the carrier of the inferred type.
    #[test]
    fn evaluation_respects_types(k in monad(), t in prop::sample::select(vec!["bool", "T bool", "bool -> T bool", "bool * bool"]), i in 0usize..10_000) {
        let m = model(k);
        let terms = terms(k, t, 5);
        let t = ty(t);
        let term = &terms[i % terms.len()];
        prop_assert_eq!(infer(&TypeCtx::new(), term, m.sig()).unwrap(), t.clone());
        let v = m.eval_closed(term).unwrap();
        prop_assert!(m.carrier(&t).unwrap().contains(&v), "{} = {}", term, v);
    }

    /// Hole evaluation agrees with plugging and evaluating from scratch.
    #[test]
    fn plugging_is_compositional(k in monad(), i in 0usize..10_000, j in 0usize..10_000) {
        let m = model(k);
        let t = ty("T bool");
        let terms = terms(k, "T bool", 4);
        let suite = ContextSuite::new(&m, &t, 5).unwrap();
        let term = &terms[i % terms.len()];
        let c = j % suite.len();
        let v = m.eval_closed(term).unwrap();
        let direct = m.eval_closed(&fill(&suite.contexts()[c].body, term)).unwrap();
        prop_assert_eq!(suite.observe(&m, c, &v).unwrap(), direct);
        prop_assert_eq!(suite.contexts()[c].plug(term).unwrap(), fill(&suite.contexts()[c].body, term));
    }

    /// Swapping the two terms keeps the verdict.
    #[test]
    fn ctx_equiv_is_symmetric(k in monad(), i in 0usize..10_000, j in 0usize..10_000) {
        let m = model(k);
        let t = ty("T bool");
        let terms = terms(k, "T bool", 4);
        let (a, b) = (&terms[i % terms.len()], &terms[j % terms.len()]);
        let ab = ctx_equiv(a, b, &t, 4, &m).unwrap();
        let ba = ctx_equiv(b, a, &t, 4, &m).unwrap();
        prop_assert_eq!(ab.is_equivalent(), ba.is_equivalent());
        prop_assert_eq!(ab.witness(), ba.witness());
    }
}
