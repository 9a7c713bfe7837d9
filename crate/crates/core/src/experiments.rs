//! Soundness, completeness, counterexample and identity-extension runs.
//!
//! Every run works on distinct denotations: closed terms with the same
//! denotation are interchangeable under every context and every relation,
//! so a pair of terms is judged by its pair of denotations, with the
//! smallest term of each denotation as its printed representative.

use std::sync::Arc;
use std::time::Instant;

use crate::config::{default_catalog, ExperimentConfig, Relations};
use crate::ctxequiv::{ContextSuite, ObservationTable};
use crate::definable::definable;
use crate::enumerate::enumerate_terms;
use crate::error::{Error, Result};
use crate::logrel::{Rel, RelFamily, MAX_REL_CARRIER};
use crate::monads::{MonadKind, MonadOptions};
use crate::report::{Record, Report};
use crate::semantics::{Elem, Model};
use crate::signature::Signature;
use crate::syntax::{Term, Type};
use crate::typing::is_first_order;

/// Distinct denotations at one type, each with its smallest known term.
#[derive(Clone, Debug)]
pub struct Domain {
    pub ty: Type,
    pub elems: Vec<Elem>,
    pub reps: Vec<Arc<Term>>,
    /// Number of terms behind each denotation.
    pub counts: Vec<usize>,
}

impl Domain {
    /// Denotations of every enumerated closed term of `t` up to `bound`.
    pub fn of_terms(model: &Model, t: &Type, bound: usize) -> Result<Domain> {
        let mut found: std::collections::BTreeMap<Elem, (Arc<Term>, usize)> = Default::default();
        for term in enumerate_terms(t, bound, model)? {
            let v = model.eval_closed(&term)?;
            found.entry(v).or_insert_with(|| (Arc::new(term), 0)).1 += 1;
        }
        Ok(Self::from_map(t, found))
    }

    fn from_map(t: &Type, found: std::collections::BTreeMap<Elem, (Arc<Term>, usize)>) -> Domain {
        let mut d = Domain { ty: t.clone(), elems: vec![], reps: vec![], counts: vec![] };
        for (e, (r, c)) in found {
            d.elems.push(e);
            d.reps.push(r);
            d.counts.push(c);
        }
        d
    }

    /// Add denotations found elsewhere, keeping the smaller representative.
    fn merge(self, more: Vec<(Elem, crate::definable::Rep)>) -> Domain {
        let mut found: std::collections::BTreeMap<Elem, (Arc<Term>, usize)> = self
            .elems
            .into_iter()
            .zip(self.reps.into_iter().zip(self.counts))
            .collect();
        for (e, r) in more {
            let slot = found.entry(e).or_insert_with(|| (r.term.clone(), 0));
            if r.size < slot.0.size() {
                slot.0 = r.term;
            }
            slot.1 = slot.1.max(1);
        }
        Self::from_map(&self.ty, found)
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn terms(&self) -> usize {
        self.counts.iter().sum()
    }

    fn size(&self, i: usize) -> usize {
        self.reps[i].size()
    }

    /// Carrier indices of the denotations.
    fn indices(&self, model: &Model) -> Result<Vec<usize>> {
        let c = model.carrier(&self.ty)?;
        self.elems.iter().map(|e| c.index_of(e)).collect()
    }
}

/// Outcome of comparing contextual equivalence with the identity-base
/// relation on a domain.
#[derive(Clone, Debug)]
pub enum Judgement {
    /// Every equivalent pair is related.
    Complete,
    /// Some pairs look equivalent but the observation functions are still
    /// growing at the bound.
    Unsaturated,
    /// An equivalent, unrelated pair (domain indices, smallest first).
    Counterexample { left: usize, right: usize, others: usize },
}

/// Details of one judgement: the bound used, the saturation status and
/// the witness pair if any.
#[derive(Clone, Debug)]
pub struct Judged {
    pub judgement: Judgement,
    pub bound: usize,
    pub contexts: usize,
    pub saturated: bool,
    pub growth: Vec<usize>,
    pub equivalent_pairs: usize,
    pub table: ObservationTable,
}

fn judge_at(
    model: &Model,
    dom: &Domain,
    lift: &Rel,
    idx: &[usize],
    bound: usize,
) -> Result<Judged> {
    let suite = ContextSuite::new(model, &dom.ty, bound)?;
    let table = suite.table(model, &dom.elems)?;
    let cols: Vec<usize> = (0..dom.len()).collect();
    let saturated = table.saturated(bound, &cols);
    let growth = table.growth(bound, &cols);
    let classes = table.classes(bound);
    let mut equivalent = Vec::new();
    for i in 0..dom.len() {
        for j in i + 1..dom.len() {
            if classes[i] == classes[j] {
                equivalent.push((i, j));
            }
        }
    }
    let mut unrelated: Vec<(usize, usize)> = equivalent
        .iter()
        .copied()
        .filter(|&(i, j)| !lift.contains(idx[i], idx[j]) || !lift.contains(idx[j], idx[i]))
        .collect();
    // Self-relatedness is a degenerate equivalent pair.
    unrelated.extend((0..dom.len()).filter(|&i| !lift.contains(idx[i], idx[i])).map(|i| (i, i)));
    unrelated.sort_by_key(|&(i, j)| {
        let (a, b) = (dom.size(i), dom.size(j));
        (a.max(b), a + b, i, j)
    });
    let judgement = if equivalent.is_empty() && unrelated.is_empty() {
        Judgement::Complete
    } else if !saturated {
        Judgement::Unsaturated
    } else if let Some(&(left, right)) = unrelated.first() {
        Judgement::Counterexample { left, right, others: unrelated.len() - 1 }
    } else {
        Judgement::Complete
    };
    Ok(Judged {
        judgement,
        bound,
        contexts: suite.len(),
        saturated,
        growth,
        equivalent_pairs: equivalent.len(),
        table,
    })
}

/// Judge a domain under identity bases at `bound`, escalating once to
/// `limit` when the verdict there is not `complete`.
pub fn judge(model: &Model, dom: &Domain, bound: usize, limit: usize) -> Result<Judged> {
    let fam = RelFamily::identity(model);
    let lift = fam.lift(model, &dom.ty)?;
    let idx = dom.indices(model)?;
    let first = judge_at(model, dom, &lift, &idx, bound)?;
    if matches!(first.judgement, Judgement::Complete) || limit <= bound {
        return Ok(first);
    }
    judge_at(model, dom, &lift, &idx, limit)
}

fn growth_text(g: &[usize]) -> String {
    g.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn judged_record(claim: &str, model: &Model, dom: &Domain, j: &Judged) -> Record {
    let verdict = match j.judgement {
        Judgement::Complete => "complete",
        Judgement::Unsaturated => "unsaturated",
        Judgement::Counterexample { .. } => "counterexample",
    };
    let mut rec = Record::new(claim)
        .with("monad", model.monad().kind)
        .with("type", &dom.ty)
        .with("terms", dom.terms())
        .with("denotations", dom.len())
        .with("bound", j.bound)
        .with("contexts", j.contexts)
        .with("saturated", j.saturated)
        .with("growth", growth_text(&j.growth))
        .with("equivalent-pairs", j.equivalent_pairs)
        .with("verdict", verdict);
    rec = match j.judgement {
        Judgement::Counterexample { left, right, others } => rec
            .with("witness", format!("{} ~ {}", dom.reps[left], dom.reps[right]))
            .with("left", &dom.elems[left])
            .with("right", &dom.elems[right])
            .with("others", others),
        _ => rec.with("witness", "-"),
    };
    rec
}

fn first_order_catalog(cfg: &ExperimentConfig) -> Result<()> {
    if let Some(t) = cfg.catalog.iter().find(|t| !is_first_order(t)) {
        return Err(Error::Config(format!("catalog type `{t}` is not first-order")));
    }
    if cfg.relations != Relations::Identity {
        return Err(Error::Config("completeness runs use identity base relations".into()));
    }
    Ok(())
}

/// For every catalog type: equivalent enumerated pairs (under a saturated
/// context bound) must be related under identity bases.
pub fn run_completeness(cfg: &ExperimentConfig) -> Result<Report> {
    let start = Instant::now();
    first_order_catalog(cfg)?;
    let model = cfg.model()?;
    let mut report = Report::default();
    let limit = cfg.context_limit.max(cfg.context_bound);
    for t in &cfg.catalog {
        let dom = Domain::of_terms(&model, t, cfg.term_bound)?;
        let j = judge(&model, &dom, cfg.context_bound, limit)?;
        let rec = judged_record("completeness", &model, &dom, &j);
        if matches!(j.judgement, Judgement::Counterexample { .. }) {
            report.violation(rec);
        } else {
            report.push(rec);
        }
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Search the catalog for an equivalent but unrelated pair, using the
/// enumerated terms and the definable denotations at each type. The summary line names the minimal
/// pair over all types and the types with no break.
pub fn find_nondet_counterexample(cfg: &ExperimentConfig) -> Result<Report> {
    let start = Instant::now();
    first_order_catalog(cfg)?;
    let model = cfg.model()?;
    let found = definable(&model, &cfg.catalog, cfg.definable_seed, cfg.definable_bound)?;
    let limit = cfg.context_limit.max(cfg.context_bound);
    let mut report = Report::default();
    let mut best: Option<((usize, usize, usize), String, Record)> = None;
    let mut break_free = Vec::new();
    let mut unsaturated = Vec::new();
    for (k, t) in cfg.catalog.iter().enumerate() {
        let dom = Domain::of_terms(&model, t, cfg.term_bound)?.merge(found.at(t));
        let j = judge(&model, &dom, cfg.context_bound, limit)?;
        report.push(judged_record("counterexample-search", &model, &dom, &j));
        match j.judgement {
            Judgement::Complete => break_free.push(t.to_string()),
            Judgement::Unsaturated => unsaturated.push(t.to_string()),
            Judgement::Counterexample { left, right, .. } => {
                let (a, b) = (dom.size(left), dom.size(right));
                let key = (a.max(b), a + b, k);
                if best.as_ref().map_or(true, |(bk, _, _)| key < *bk) {
                    let rec = Record::new("counterexample")
                        .with("monad", model.monad().kind)
                        .with("type", t)
                        .with("left", &dom.reps[left])
                        .with("right", &dom.reps[right])
                        .with("left-value", &dom.elems[left])
                        .with("right-value", &dom.elems[right])
                        .with("stable-through", j.bound);
                    best = Some((key, t.to_string(), rec));
                }
            }
        }
    }
    let summary = Record::new("counterexample-summary").with("monad", model.monad().kind);
    let summary = match best {
        Some((_, ty, rec)) => {
            report.push(rec);
            summary.with("verdict", "found").with("type", ty)
        }
        None => summary.with("verdict", "none-found").with("type", "-"),
    };
    let list = |v: &[String]| if v.is_empty() { "-".to_string() } else { v.join("; ") };
    report.push(
        summary
            .with("break-free", list(&break_free))
            .with("unsaturated", list(&unsaturated)),
    );
    report.elapsed = start.elapsed();
    Ok(report)
}

/// One soundness configuration: the model terms are drawn from and the
/// model contexts are drawn from.
struct SoundnessSetup {
    label: &'static str,
    terms: Model,
    contexts: Model,
}

/// Related pairs of enumerated terms must never be told apart by a
/// context. Each denotation must also be related to itself (the basic
/// lemma for closed terms). With `ccall` on, two setups are run: `ccall`
/// in contexts only, and in terms too; failures there are recorded as
/// findings and do not count as violations.
pub fn run_soundness(cfg: &ExperimentConfig) -> Result<Report> {
    let start = Instant::now();
    let model = cfg.model()?;
    let ccall = cfg.options.ccall && cfg.monad() == MonadKind::Continuation;
    let setups = if ccall {
        let plain = MonadOptions { ccall: false, ..cfg.options };
        vec![
            SoundnessSetup {
                label: "contexts-only",
                terms: Model::new(cfg.signature.clone(), plain)?.with_budget(cfg.budget),
                contexts: cfg.model()?,
            },
            SoundnessSetup { label: "terms-too", terms: cfg.model()?, contexts: cfg.model()? },
        ]
    } else {
        vec![SoundnessSetup { label: "plain", terms: cfg.model()?, contexts: cfg.model()? }]
    };
    let families = cfg.families(&model)?;
    let mut report = Report::default();
    for setup in &setups {
        let mut finding: Option<String> = None;
        for t in &cfg.catalog {
            let dom = Domain::of_terms(&setup.terms, t, cfg.term_bound)?;
            let suite = ContextSuite::new(&setup.contexts, t, cfg.context_bound)?;
            let table = suite.table(&setup.contexts, &dom.elems)?;
            let idx = dom.indices(&setup.contexts)?;
            for (label, fam) in &families {
                let lift = fam.lift(&setup.contexts, t)?;
                let mut related_pairs = 0usize;
                let mut witness: Option<String> = None;
                let mut kind = "clean";
                for i in 0..dom.len() {
                    if !lift.contains(idx[i], idx[i]) && witness.is_none() {
                        kind = "basic-lemma";
                        witness = Some(format!("term={}", dom.reps[i]));
                    }
                }
                for i in 0..dom.len() {
                    for j in 0..dom.len() {
                        if !lift.contains(idx[i], idx[j]) {
                            continue;
                        }
                        related_pairs += dom.counts[i] * dom.counts[j];
                        if i != j && witness.is_none() {
                            if let Some(k) = table.distinguishing(i, j, cfg.context_bound) {
                                kind = "distinguished";
                                witness = Some(format!(
                                    "left={} right={} context={}",
                                    dom.reps[i],
                                    dom.reps[j],
                                    suite.contexts()[k]
                                ));
                            }
                        }
                    }
                }
                let rec = Record::new("soundness")
                    .with("monad", model.monad().kind)
                    .with("setup", setup.label)
                    .with("relations", label)
                    .with("type", t)
                    .with("terms", dom.terms())
                    .with("denotations", dom.len())
                    .with("related-pairs", related_pairs)
                    .with("contexts", suite.len())
                    .with("verdict", if witness.is_some() { "violation" } else { "clean" })
                    .with("kind", kind)
                    .with("witness", witness.clone().unwrap_or_else(|| "-".into()));
                match witness {
                    Some(w) => {
                        if finding.is_none() {
                            finding = Some(format!("relations={label} type={t} {w}"));
                        }
                        if ccall {
                            report.push(rec);
                        } else {
                            report.violation(rec);
                        }
                    }
                    None => report.push(rec),
                }
            }
        }
        if ccall {
            report.push(
                Record::new("ccall-exploration")
                    .with("setup", setup.label)
                    .with("outcome", if finding.is_some() { "violation" } else { "clean" })
                    .with("witness", finding.unwrap_or_else(|| "-".into())),
            );
        }
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Types checked for identity extension with an extra base `b`.
fn extension_catalog(sig: &Signature) -> Vec<Type> {
    let mut out = default_catalog(sig);
    for t in ["b", "T b", "b -> T b", "b * bool", "bool -> b"] {
        out.push(Type::parse(t).expect("catalog type"));
    }
    out
}

/// The lift of identity base relations is the identity at every catalog
/// type, for an extra base of each size `1..=max_base`.
pub fn run_identity_extension(monad: MonadKind, max_base: u32) -> Result<Report> {
    let start = Instant::now();
    let mut report = Report::default();
    for n in 1..=max_base {
        let sig = Signature::default_for(monad).with_base("b", n);
        let model = Model::new(sig.clone(), MonadOptions::default())?;
        let fam = RelFamily::identity(&model);
        for t in extension_catalog(&sig).iter().filter(|t| is_first_order(t)) {
            let rec = Record::new("identity-extension")
                .with("monad", monad)
                .with("base-size", n)
                .with("type", t);
            let size = model.carrier_size(t)?;
            if size > MAX_REL_CARRIER as u128 {
                report.push(rec.with("carrier", size).with("verdict", "skipped"));
                continue;
            }
            let lift = fam.lift(&model, t)?;
            let rec = rec.with("carrier", size);
            if lift.is_identity() {
                report.push(rec.with("verdict", "identity"));
            } else {
                report.violation(rec.with("verdict", "differs").with("pairs", lift.len()));
            }
        }
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn identity_monad_controls() {
        let c = cfg("monad = identity\ncatalog = bool, T bool, bool -> T bool\nterm-bound = 5\ncontext-bound = 5");
        let s = run_soundness(&c).unwrap();
        assert_eq!(s.violations, 0, "{}", s.render());
        let k = run_completeness(&c).unwrap();
        assert_eq!(k.violations, 0);
        assert!(k.records.iter().all(|r| r.get("verdict") == Some("complete")), "{}", k.render());
        let x = find_nondet_counterexample(&cfg(
            "monad = identity\ncatalog = bool, T bool\ndefinable-bound = 6\ncontext-bound = 5\ncontext-limit = 5",
        ))
        .unwrap();
        assert_eq!(x.find("claim", "counterexample-summary").next().unwrap().get("verdict"), Some("none-found"));
    }

    #[test]
    fn partiality_sweep_is_sound() {
        let c = cfg("monad = partiality\nbase b = 2\ncatalog = T b, b -> T b\nterm-bound = 5\ncontext-bound = 5\nrelations = sweep");
        let s = run_soundness(&c).unwrap();
        assert_eq!(s.violations, 0, "{}", s.render());
        assert_eq!(s.records.len(), 2 * 16);
    }

    #[test]
    fn identity_extension_small() {
        for m in [MonadKind::Identity, MonadKind::Partiality, MonadKind::Exceptions] {
            let r = run_identity_extension(m, 2).unwrap();
            assert_eq!(r.violations, 0, "{}", r.render());
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let c = cfg("monad = exceptions\ncatalog = T bool\nterm-bound = 5\ncontext-bound = 5");
        assert_eq!(run_completeness(&c).unwrap().render(), run_completeness(&c).unwrap().render());
    }
}
