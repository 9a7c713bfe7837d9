//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::time::Instant;

use common::{model, naive_distinguish, ty};
use mew::config::ExperimentConfig;
use mew::experiments::{find_nondet_counterexample, run_completeness, run_identity_extension, run_soundness};
use mew::laws::run_laws;
use mew::report::Report;
use mew::{ctx_equiv, enumerate_terms, MonadKind, MonadOptions, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NONDET_LEFT: &str = "(or[T bool] ((val (val false)), (val (or[bool] ((val true), (val false))))))";
const NONDET_RIGHT: &str = "(val (or[bool] ((val true), (val false))))";

const CCALL_CONFIG: &str = "monad = continuation
base b = 2
ccall = true
relations = sweep
catalog = bool, T bool, bool -> T bool, bool * bool, T b, b -> T b";

/// Recorded outcome of the `ccall` exploration, one entry per setup.
const CCALL_OUTCOME: [(&str, &str); 2] = [("contexts-only", "clean"), ("terms-too", "clean")];

fn cfg(text: &str) -> ExperimentConfig {
    ExperimentConfig::parse(text).unwrap()
}

fn zero(reports: Vec<Report>) -> std::result::Result<String, String> {
    let v: usize = reports.iter().map(|r| r.violations).sum();
    let n: usize = reports.iter().map(|r| r.records.len()).sum();
    if v == 0 {
        Ok(format!("{n} records, 0 violations"))
    } else {
        let bad: Vec<String> = reports
            .iter()
            .flat_map(|r| &r.records)
            .filter(|x| matches!(x.get("verdict"), Some("violation" | "differs" | "counterexample")))
            .take(3)
            .map(|x| x.to_string())
            .collect();
        Err(format!("{v} violations: {}", bad.join(" | ")))
    }
}

fn laws() -> Result<std::result::Result<String, String>> {
    let reports = MonadKind::ALL
        .iter()
        .map(|&k| run_laws(k, MonadOptions::default(), 6, 0))
        .collect::<Result<Vec<_>>>()?;
    let count = |k: &str| -> usize {
        reports.iter().flat_map(|r| &r.records).filter_map(|x| x.get(k)?.parse::<usize>().ok()).sum()
    };
    // Large Kleisli spaces are sampled; say how many.
    let split = format!("{} triples exhaustive, {} sampled", count("exhaustive"), count("sampled"));
    Ok(zero(reports).map(|d| format!("{d}, {split}")))
}

fn soundness() -> Result<std::result::Result<String, String>> {
    let reports = MonadKind::ALL
        .iter()
        .map(|&k| run_soundness(&ExperimentConfig::new(k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(zero(reports))
}

fn completeness() -> Result<std::result::Result<String, String>> {
    let configs = [
        "monad = partiality",
        "monad = exceptions",
        "monad = exceptions\nbase exn = 2\nexception-base = exn",
        "monad = state",
    ];
    let mut reports = Vec::new();
    for c in configs {
        reports.push(run_completeness(&cfg(c))?);
    }
    let not_complete: Vec<String> = reports
        .iter()
        .flat_map(|r| &r.records)
        .filter(|x| x.get("verdict").is_some_and(|v| v != "complete"))
        .map(|x| x.to_string())
        .collect();
    Ok(if not_complete.is_empty() {
        zero(reports)
    } else {
        Err(not_complete.join(" | "))
    })
}

fn counterexample() -> Result<std::result::Result<String, String>> {
    let r = find_nondet_counterexample(&ExperimentConfig::new(MonadKind::Nondet))?;
    let summary = r.find("claim", "counterexample-summary").next().cloned();
    let found = r.find("claim", "counterexample").next().cloned();
    let Some(summary) = summary else { return Ok(Err("no summary".into())) };
    let break_free: Vec<&str> = summary.get("break-free").unwrap_or("").split("; ").collect();
    if !break_free.contains(&"T bool") {
        return Ok(Err(format!("T bool not break-free: {summary}")));
    }
    Ok(match found {
        Some(x)
            if x.get("type") == Some("T T bool")
                && x.get("left") == Some(NONDET_LEFT)
                && x.get("right") == Some(NONDET_RIGHT) =>
        {
            Ok(format!("pair at T T bool, stable through {}", x.get("stable-through").unwrap_or("?")))
        }
        Some(x) => Err(format!("unexpected pair: {x}")),
        None => Err(format!("none found: {summary}")),
    })
}

fn continuation() -> Result<std::result::Result<String, String>> {
    if let Err(e) = zero(vec![run_soundness(&ExperimentConfig::new(MonadKind::Continuation))?]) {
        return Ok(Err(format!("ccall off: {e}")));
    }
    let r = run_soundness(&cfg(CCALL_CONFIG))?;
    let got: Vec<(String, String)> = r
        .find("claim", "ccall-exploration")
        .map(|x| (x.get("setup").unwrap_or("").to_string(), x.get("outcome").unwrap_or("").to_string()))
        .collect();
    let want: Vec<(String, String)> = CCALL_OUTCOME.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    Ok(if got == want {
        Ok(format!("ccall off clean; ccall on {got:?}"))
    } else {
        Err(format!("ccall outcome {got:?}, recorded {want:?}"))
    })
}

fn oracle_agreement() -> Result<std::result::Result<String, String>> {
    let t = ty("T bool");
    let mut checked = 0;
    let mut equivalent = 0;
    for (i, &k) in MonadKind::ALL.iter().enumerate() {
        let m = model(k);
        let terms = enumerate_terms(&t, 5, &m)?;
        let values = terms.iter().map(|x| m.eval_closed(x)).collect::<Result<Vec<_>>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
        for n in 0..100 {
            let a = rng.gen_range(0..terms.len());
            // Half the pairs share a denotation, so both verdicts get exercised.
            let b = if n % 2 == 0 {
                rng.gen_range(0..terms.len())
            } else {
                let same: Vec<usize> = (0..terms.len()).filter(|&j| values[j] == values[a]).collect();
                *same.choose(&mut rng).unwrap()
            };
            let fast = ctx_equiv(&terms[a], &terms[b], &t, 4, &m)?.is_equivalent();
            let slow = naive_distinguish(&m, &terms[a], &terms[b], &t, 4).is_none();
            if fast != slow {
                return Ok(Err(format!("{k}: {} vs {}: oracle {fast}, naive {slow}", terms[a], terms[b])));
            }
            checked += 1;
            equivalent += fast as usize;
        }
    }
    Ok(Ok(format!("{checked}/{checked} agree, {equivalent} equivalent")))
}

fn identity_extension() -> Result<std::result::Result<String, String>> {
    let reports = [MonadKind::Identity, MonadKind::Partiality, MonadKind::Exceptions, MonadKind::State]
        .iter()
        .map(|&k| run_identity_extension(k, 3))
        .collect::<Result<Vec<_>>>()?;
    Ok(zero(reports))
}

type Check = fn() -> Result<std::result::Result<String, String>>;

fn main() {
    let criteria: [(&str, Check); 7] = [
        ("monad laws, six monads, carriers up to 6", laws),
        ("soundness under default configurations", soundness),
        ("completeness at first-order types", completeness),
        ("nondeterminism counterexample", counterexample),
        ("continuation with and without ccall", continuation),
        ("context oracle against naive plugging", oracle_agreement),
        ("identity extension at first order", identity_extension),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = match check() {
            Ok(o) => o,
            Err(e) => Err(format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}; {secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail}; {secs:.1}s)", i + 1)
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
