//! Bounded contextual equivalence: two closed terms are compared under
//! every enumerated context of observation type `T bool`.

use std::collections::HashSet;
use std::sync::Arc;

use rayon::prelude::*;

use crate::enumerate::{type_universe, Enumerator};
use crate::error::{Result, TypeError};
use crate::semantics::{Carrier, Compiled, Elem, Model};
use crate::syntax::{Context, Term, Type};
use crate::typing::TypeCtx;

/// The observation type.
pub fn observation_type() -> Type {
    Type::comp(Type::Bool)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    /// No context up to `bound` tells the terms apart.
    Equivalent { bound: usize },
    /// The first distinguishing context and the two observations.
    Distinguished { witness: Context, left: Elem, right: Elem },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent { .. })
    }

    pub fn witness(&self) -> Option<&Context> {
        match self {
            Verdict::Distinguished { witness, .. } => Some(witness),
            Verdict::Equivalent { .. } => None,
        }
    }
}

/// The compiled contexts for one hole type, in canonical order: by size,
/// then by generation order.
pub struct ContextSuite {
    hole: Type,
    bound: usize,
    contexts: Vec<Context>,
    compiled: Vec<Compiled>,
}

impl ContextSuite {
    /// Contexts up to `bound`, skipping those with a redex that a smaller
    /// context already covers.
    pub fn new(model: &Model, hole: &Type, bound: usize) -> Result<ContextSuite> {
        Self::build(model, hole, bound, true)
    }

    /// Every context up to `bound`.
    pub fn unpruned(model: &Model, hole: &Type, bound: usize) -> Result<ContextSuite> {
        Self::build(model, hole, bound, false)
    }

    fn build(model: &Model, hole: &Type, bound: usize, prune: bool) -> Result<ContextSuite> {
        model.sig().check_type(hole)?;
        let obs = observation_type();
        let mut e = Enumerator::new(model, type_universe(model, std::slice::from_ref(hole)))
            .with_hole(hole.clone())
            .pruned(prune)
            .confined(std::slice::from_ref(&obs));
        let bodies = e.contexts(&obs, bound);
        let contexts: Vec<Context> = bodies
            .iter()
            .map(|b| Context::new((**b).clone(), hole.clone(), obs.clone()))
            .collect::<Result<_>>()?;
        let compiled = contexts
            .par_iter()
            .map(|c| model.compile(&TypeCtx::new(), &c.body, Some(hole)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ContextSuite { hole: hole.clone(), bound, contexts, compiled })
    }

    pub fn hole_type(&self) -> &Type {
        &self.hole
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    /// Number of contexts of size at most `b`.
    pub fn count_up_to(&self, b: usize) -> usize {
        self.contexts.partition_point(|c| c.size() <= b)
    }

    /// The observation made by context `k` on the hole value `v`.
    pub fn observe(&self, model: &Model, k: usize, v: &Elem) -> Result<Elem> {
        self.compiled[k].eval(model, &[], Some(v))
    }

    /// The first context (up to size `b`) observing `a` and `b` differently.
    pub fn first_distinguishing(
        &self,
        model: &Model,
        a: &Elem,
        b: &Elem,
        bound: usize,
    ) -> Result<Option<(usize, Elem, Elem)>> {
        let n = self.count_up_to(bound);
        let spec = model.monad();
        let found = (0..n)
            .into_par_iter()
            .map(|k| -> Result<Option<(usize, Elem, Elem)>> {
                let l = self.observe(model, k, a)?;
                let r = self.observe(model, k, b)?;
                Ok((!spec.observe_eq(&l, &r)).then_some((k, l, r)))
            })
            .find_map_first(|r| match r {
                Ok(None) => None,
                other => Some(other),
            });
        found.transpose().map(Option::flatten)
    }

    /// Observations of every context on every element of `domain`.
    pub fn table(&self, model: &Model, domain: &[Elem]) -> Result<ObservationTable> {
        let obs: Arc<Carrier> = model.carrier(&observation_type())?;
        let rows = self
            .compiled
            .par_iter()
            .map(|c| {
                domain
                    .iter()
                    .map(|v| Ok(obs.index_of(&c.eval(model, &[], Some(v))?)? as u32))
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ObservationTable {
            domain: domain.to_vec(),
            rows,
            sizes: self.contexts.iter().map(Context::size).collect(),
        })
    }
}

/// Observation indices (into the carrier of `T bool`) of each context on
/// each element of a domain.
#[derive(Clone, Debug)]
pub struct ObservationTable {
    pub domain: Vec<Elem>,
    /// One row per context, one column per domain element.
    pub rows: Vec<Vec<u32>>,
    pub sizes: Vec<usize>,
}

impl ObservationTable {
    fn up_to(&self, b: usize) -> usize {
        self.sizes.partition_point(|&s| s <= b)
    }

    /// Number of distinct observation functions, restricted to the columns
    /// `cols`, induced by contexts of size at most `b`.
    pub fn functions_up_to(&self, b: usize, cols: &[usize]) -> usize {
        self.rows[..self.up_to(b)]
            .iter()
            .map(|r| cols.iter().map(|&c| r[c]).collect::<Vec<u32>>())
            .collect::<HashSet<_>>()
            .len()
    }

    /// Counts of distinct observation functions on `cols` for each bound
    /// `1..=max`.
    pub fn growth(&self, max: usize, cols: &[usize]) -> Vec<usize> {
        (1..=max).map(|b| self.functions_up_to(b, cols)).collect()
    }

    /// Whether the last two bounds up to `bound` added no observation
    /// function on `cols`.
    pub fn saturated(&self, bound: usize, cols: &[usize]) -> bool {
        bound >= 3 && self.functions_up_to(bound, cols) == self.functions_up_to(bound - 2, cols)
    }

    /// The first context of size at most `b` separating columns `i` and `j`.
    pub fn distinguishing(&self, i: usize, j: usize, b: usize) -> Option<usize> {
        self.rows[..self.up_to(b)].iter().position(|r| r[i] != r[j])
    }

    /// Class index of every column under equality of observations up to `b`;
    /// classes are numbered by first occurrence.
    pub fn classes(&self, b: usize) -> Vec<usize> {
        let rows = &self.rows[..self.up_to(b)];
        let mut reps: Vec<usize> = Vec::new();
        let mut out = Vec::with_capacity(self.domain.len());
        for c in 0..self.domain.len() {
            match reps.iter().position(|&r| rows.iter().all(|row| row[r] == row[c])) {
                Some(k) => out.push(k),
                None => {
                    out.push(reps.len());
                    reps.push(c);
                }
            }
        }
        out
    }
}

fn closed_at(model: &Model, m: &Term, t: &Type) -> Result<Elem> {
    let (ty, v) = model.denote(m)?;
    if &ty != t {
        return Err(TypeError::ArgMismatch { expected: t.clone(), found: ty }.into());
    }
    Ok(v)
}

/// Compare two closed terms of type `t` under all contexts up to `bound`.
pub fn ctx_equiv(m: &Term, n: &Term, t: &Type, bound: usize, model: &Model) -> Result<Verdict> {
    let suite = ContextSuite::new(model, t, bound)?;
    ctx_equiv_in(&suite, m, n, model)
}

/// As [`ctx_equiv`], with a prepared suite.
pub fn ctx_equiv_in(suite: &ContextSuite, m: &Term, n: &Term, model: &Model) -> Result<Verdict> {
    let a = closed_at(model, m, suite.hole_type())?;
    let b = closed_at(model, n, suite.hole_type())?;
    Ok(match suite.first_distinguishing(model, &a, &b, suite.bound())? {
        None => Verdict::Equivalent { bound: suite.bound() },
        Some((k, left, right)) => {
            Verdict::Distinguished { witness: suite.contexts()[k].clone(), left, right }
        }
    })
}

#[derive(Clone, Debug)]
pub struct Stabilization {
    /// Verdict at each bound `1..=max`.
    pub verdicts: Vec<Verdict>,
}

impl Stabilization {
    /// The least bound with a distinguishing context, if any.
    pub fn least_distinguishing(&self) -> Option<usize> {
        self.verdicts.iter().position(|v| !v.is_equivalent()).map(|i| i + 1)
    }

    pub fn stable_equivalent(&self) -> bool {
        self.least_distinguishing().is_none()
    }
}

/// Verdicts for every bound up to `max_bound`.
pub fn stabilization_scan(
    m: &Term,
    n: &Term,
    t: &Type,
    max_bound: usize,
    model: &Model,
) -> Result<Stabilization> {
    let suite = ContextSuite::new(model, t, max_bound)?;
    let a = closed_at(model, m, t)?;
    let b = closed_at(model, n, t)?;
    let first = suite.first_distinguishing(model, &a, &b, max_bound)?;
    let verdicts = (1..=max_bound)
        .map(|bound| match &first {
            Some((k, l, r)) if suite.contexts()[*k].size() <= bound => Verdict::Distinguished {
                witness: suite.contexts()[*k].clone(),
                left: l.clone(),
                right: r.clone(),
            },
            _ => Verdict::Equivalent { bound },
        })
        .collect();
    Ok(Stabilization { verdicts })
}
