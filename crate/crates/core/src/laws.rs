//! The three monad laws, checked on the semantic `ret`/`bind`.
//!
//! Carriers of size `1..=max` are represented by fresh bases `k1..kmax`.
//! For each triple of carriers the laws are checked over every element and
//! every Kleisli function when that fits in [`EXHAUSTIVE_WORK`] checks;
//! otherwise a fixed number of seeded random instances is drawn.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::monads::{MonadKind, MonadOptions};
use crate::report::{Record, Report};
use crate::semantics::{Elem, Model, MonV};
use crate::signature::Signature;
use crate::syntax::Type;

/// Largest number of instances checked exhaustively for one law and triple.
pub const EXHAUSTIVE_WORK: u128 = 1 << 17;
/// Instances drawn per law and triple when exhaustive checking is too big.
pub const SAMPLES: usize = 1024;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Law {
    LeftIdentity,
    RightIdentity,
    Associativity,
}

impl Law {
    pub const ALL: [Law; 3] = [Law::LeftIdentity, Law::RightIdentity, Law::Associativity];

    pub fn name(self) -> &'static str {
        match self {
            Law::LeftIdentity => "left-identity",
            Law::RightIdentity => "right-identity",
            Law::Associativity => "associativity",
        }
    }
}

/// Tally for one law over all carrier triples.
#[derive(Clone, Debug, Default)]
pub struct LawTally {
    pub exhaustive: usize,
    pub sampled: usize,
    pub checks: u64,
    pub violation: Option<String>,
}

fn carrier_type(n: usize) -> Type {
    Type::base(&format!("k{n}"))
}

/// The model used for law checks: the default signature of `monad` with
/// bases `k1..kmax`.
pub fn law_model(monad: MonadKind, options: MonadOptions, max: usize) -> Result<Model> {
    let mut sig = Signature::default_for(monad);
    for n in 1..=max {
        sig = sig.with_base(&format!("k{n}"), n as u32);
    }
    Model::new(sig, options)
}

/// A uniformly random element of ⟦T x⟧, drawn without enumerating it.
pub fn random_comp(model: &Model, x: &Type, rng: &mut impl Rng) -> Result<Elem> {
    let spec = model.monad();
    let xs = model.carrier(x)?;
    let xs = xs.elems();
    let pick = |rng: &mut dyn rand::RngCore| xs[rng.gen_range(0..xs.len())].clone();
    Ok(Elem::Mon(match spec.kind {
        MonadKind::Identity => MonV::Id(Arc::new(pick(rng))),
        MonadKind::Partiality => match rng.gen_range(0..=xs.len()) {
            0 => MonV::Bottom,
            i => MonV::Up(Arc::new(xs[i - 1].clone())),
        },
        MonadKind::Exceptions => {
            let e = spec.exceptions as usize;
            match rng.gen_range(0..e + xs.len()) {
                i if i < e => MonV::Exn(i as u32),
                i => MonV::Ok(Arc::new(xs[i - e].clone())),
            }
        }
        MonadKind::State => MonV::State(
            (0..spec.states)
                .map(|_| (pick(rng), rng.gen_range(0..spec.states)))
                .collect(),
        ),
        MonadKind::Nondet => loop {
            let chosen: Vec<Elem> = xs.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
            if !chosen.is_empty() || spec.options.allow_empty {
                break MonV::Set(chosen.into());
            }
        },
        MonadKind::Continuation => {
            let rty = spec.answer_type().expect("answer base");
            let ks = model.carrier_size(&Type::arrow(x.clone(), rty))? as usize;
            MonV::Cont((0..ks).map(|_| rng.gen_range(0..spec.answers)).collect())
        }
    }))
}

/// A Kleisli arrow `x -> T y` as a table indexed by the carrier of `x`.
struct Kleisli {
    table: Vec<Elem>,
}

impl Kleisli {
    fn apply(&self, model: &Model, x: &Type, a: &Elem) -> Result<Elem> {
        Ok(self.table[model.carrier(x)?.index_of(a)?].clone())
    }
}

/// Every table of length `len` over `values`, in lexicographic order.
fn all_tables<'a>(values: &'a [Elem], len: usize) -> impl Iterator<Item = Kleisli> + 'a {
    let n = values.len();
    let total = (n as u128).pow(len as u32);
    (0..total).map(move |mut i| {
        let mut table = vec![values[0].clone(); len];
        for slot in table.iter_mut().rev() {
            *slot = values[(i % n as u128) as usize].clone();
            i /= n as u128;
        }
        Kleisli { table }
    })
}

fn random_kleisli(model: &Model, x: &Type, y: &Type, rng: &mut impl Rng) -> Result<Kleisli> {
    let n = model.carrier(x)?.len();
    Ok(Kleisli { table: (0..n).map(|_| random_comp(model, y, rng)).collect::<Result<_>>()? })
}

fn bind_k(model: &Model, x: &Type, y: &Type, m: &Elem, f: &Kleisli) -> Result<Elem> {
    model.bind(x, y, m, &mut |a| f.apply(model, x, a))
}

/// Outcome of one law on one triple: checks made, whether exhaustive, and
/// the first failing instance.
struct Outcome {
    checks: u64,
    exhaustive: bool,
    failure: Option<String>,
}

fn check_triple(model: &Model, law: Law, tys: [&Type; 3], seed: u64) -> Result<Outcome> {
    let [a, b, c] = tys;
    let size = |t: &Type| model.carrier_size(t);
    let (na, nb) = (size(a)?, size(b)?);
    let (ta, tb, tc) = (size(&Type::comp(a.clone()))?, size(&Type::comp(b.clone()))?, size(&Type::comp(c.clone()))?);
    let pow = |base: u128, e: u128| -> u128 {
        (0..e).fold(1u128, |acc, _| acc.saturating_mul(base))
    };
    let work = match law {
        Law::LeftIdentity => na.saturating_mul(pow(tb, na)),
        Law::RightIdentity => ta,
        Law::Associativity => ta.saturating_mul(pow(tb, na)).saturating_mul(pow(tc, nb)),
    };
    let exhaustive = work <= EXHAUSTIVE_WORK;
    let mut checks = 0u64;
    let left_identity = |x: &Elem, f: &Kleisli| -> Result<Option<String>> {
        let lhs = bind_k(model, a, b, &model.ret(a, x.clone())?, f)?;
        let rhs = f.apply(model, a, x)?;
        Ok((lhs != rhs).then(|| format!("a={x} f={} lhs={lhs} rhs={rhs}", show(&f.table))))
    };
    let right_identity = |m: &Elem| -> Result<Option<String>> {
        let lhs = model.bind(a, a, m, &mut |x| model.ret(a, x.clone()))?;
        Ok((&lhs != m).then(|| format!("m={m} lhs={lhs}")))
    };
    let assoc = |m: &Elem, f: &Kleisli, g: &Kleisli| -> Result<Option<String>> {
        let lhs = bind_k(model, b, c, &bind_k(model, a, b, m, f)?, g)?;
        let rhs = model.bind(a, c, m, &mut |x| bind_k(model, b, c, &f.apply(model, a, x)?, g))?;
        Ok((lhs != rhs).then(|| {
            format!("m={m} f={} g={} lhs={lhs} rhs={rhs}", show(&f.table), show(&g.table))
        }))
    };
    if exhaustive {
        let comps = |t: &Type| model.comp_elems(t);
        match law {
            Law::LeftIdentity => {
                let tbs = comps(b)?;
                for f in all_tables(&tbs, na as usize) {
                    for x in model.carrier(a)?.elems() {
                        checks += 1;
                        if let Some(w) = left_identity(x, &f)? {
                            return Ok(Outcome { checks, exhaustive, failure: Some(w) });
                        }
                    }
                }
            }
            Law::RightIdentity => {
                for m in comps(a)? {
                    checks += 1;
                    if let Some(w) = right_identity(&m)? {
                        return Ok(Outcome { checks, exhaustive, failure: Some(w) });
                    }
                }
            }
            Law::Associativity => {
                let (tas, tbs, tcs) = (comps(a)?, comps(b)?, comps(c)?);
                let gs: Vec<Kleisli> = all_tables(&tcs, nb as usize).collect();
                for f in all_tables(&tbs, na as usize) {
                    for m in &tas {
                        for g in &gs {
                            checks += 1;
                            if let Some(w) = assoc(m, &f, g)? {
                                return Ok(Outcome { checks, exhaustive, failure: Some(w) });
                            }
                        }
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..SAMPLES {
            checks += 1;
            let found = match law {
                Law::LeftIdentity => {
                    let xs = model.carrier(a)?;
                    let x = xs.elems()[rng.gen_range(0..xs.len())].clone();
                    left_identity(&x, &random_kleisli(model, a, b, &mut rng)?)?
                }
                Law::RightIdentity => right_identity(&random_comp(model, a, &mut rng)?)?,
                Law::Associativity => {
                    let m = random_comp(model, a, &mut rng)?;
                    let f = random_kleisli(model, a, b, &mut rng)?;
                    let g = random_kleisli(model, b, c, &mut rng)?;
                    assoc(&m, &f, &g)?
                }
            };
            if let Some(w) = found {
                return Ok(Outcome { checks, exhaustive, failure: Some(w) });
            }
        }
    }
    Ok(Outcome { checks, exhaustive, failure: None })
}

fn show(table: &[Elem]) -> String {
    let parts: Vec<String> = table.iter().map(Elem::to_string).collect();
    format!("[{}]", parts.join(","))
}

/// Check all three laws for one monad over carriers of size `1..=max`.
pub fn check_laws(
    monad: MonadKind,
    options: MonadOptions,
    max: usize,
    seed: u64,
) -> Result<Vec<(Law, LawTally)>> {
    let model = law_model(monad, options, max)?;
    let types: Vec<Type> = (1..=max).map(carrier_type).collect();
    let mut out = Vec::new();
    for law in Law::ALL {
        let triples: Vec<[usize; 3]> = match law {
            Law::RightIdentity => (0..max).map(|i| [i, i, i]).collect(),
            Law::LeftIdentity => {
                (0..max).flat_map(|i| (0..max).map(move |j| [i, j, j])).collect()
            }
            Law::Associativity => (0..max)
                .flat_map(|i| (0..max).flat_map(move |j| (0..max).map(move |k| [i, j, k])))
                .collect(),
        };
        let outcomes = triples
            .par_iter()
            .enumerate()
            .map(|(n, t)| {
                let tys = [&types[t[0]], &types[t[1]], &types[t[2]]];
                let triple_seed = seed ^ ((law as u64) << 56) ^ (n as u64).wrapping_mul(0x9e37_79b9);
                check_triple(&model, law, tys, triple_seed).map(|o| (t, o))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut tally = LawTally::default();
        for (t, o) in outcomes {
            if o.exhaustive {
                tally.exhaustive += 1;
            } else {
                tally.sampled += 1;
            }
            tally.checks += o.checks;
            if tally.violation.is_none() {
                if let Some(w) = o.failure {
                    let names: Vec<String> = t.iter().map(|&i| types[i].to_string()).collect();
                    tally.violation = Some(format!("types={} {w}", names.join(",")));
                }
            }
        }
        out.push((law, tally));
    }
    Ok(out)
}

/// Law report for one monad.
pub fn run_laws(monad: MonadKind, options: MonadOptions, max: usize, seed: u64) -> Result<Report> {
    let start = std::time::Instant::now();
    let mut report = Report::default();
    for (law, tally) in check_laws(monad, options, max, seed)? {
        let rec = Record::new("laws")
            .with("monad", monad)
            .with("law", law.name())
            .with("max-carrier", max)
            .with("exhaustive", tally.exhaustive)
            .with("sampled", tally.sampled)
            .with("checks", tally.checks);
        match tally.violation {
            None => report.push(rec.with("verdict", "ok").with("witness", "-")),
            Some(w) => report.violation(rec.with("verdict", "violated").with("witness", w)),
        }
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_comps_are_carrier_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for monad in MonadKind::ALL {
            let m = law_model(monad, MonadOptions::default(), 3).unwrap();
            for n in 1..=3 {
                let x = carrier_type(n);
                let all = m.comp_elems(&x).unwrap();
                for _ in 0..50 {
                    let e = random_comp(&m, &x, &mut rng).unwrap();
                    assert!(all.contains(&e), "{monad}: {e} not in T {x}");
                }
            }
        }
    }

    #[test]
    fn small_laws_hold() {
        for monad in MonadKind::ALL {
            for (law, tally) in check_laws(monad, MonadOptions::default(), 2, 1).unwrap() {
                assert!(tally.violation.is_none(), "{monad} {}: {:?}", law.name(), tally.violation);
                assert!(tally.checks > 0);
            }
        }
    }

    #[test]
    fn broken_bind_is_caught() {
        // A "monad" whose unit forgets the argument is caught by left identity.
        let m = law_model(MonadKind::Partiality, MonadOptions::default(), 2).unwrap();
        let a = carrier_type(2);
        let tbs = m.comp_elems(&a).unwrap();
        let f = all_tables(&tbs, 2).nth(5).unwrap();
        let x = m.carrier(&a).unwrap().elems()[1].clone();
        let bad_ret = Elem::Mon(MonV::Bottom);
        let lhs = bind_k(&m, &a, &a, &bad_ret, &f).unwrap();
        assert_ne!(lhs, f.apply(&m, &a, &x).unwrap());
    }
}
