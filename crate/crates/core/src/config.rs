//! Experiment configuration: a flat `key = value` file.
//!
//! ```text
//! monad = state
//! base b = 2
//! catalog = bool, T bool, st -> T st
//! term-bound = 7
//! context-bound = 7
//! context-limit = 11
//! relations = identity        -- or `sweep`, or explicit `relation b = ...`
//! relation b = (0,1) (1,0)
//! ccall = false
//! seed = 0
//! ```
//!
//! Signature lines (`base`, `monad`, `state-base`, `answer-base`,
//! `exception-base`) may appear in the same file. When no designated base
//! is given the monad's default signature is used and the listed bases are
//! added to it.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::logrel::{Rel, RelFamily};
use crate::monads::{MonadKind, MonadOptions};
use crate::semantics::{Model, DEFAULT_BUDGET};
use crate::signature::{strip_comment, Signature};
use crate::syntax::{Name, Type};

/// Which base relations an experiment runs under.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Relations {
    Identity,
    /// Explicit pair lists; unlisted bases get the identity.
    Explicit(BTreeMap<Name, Vec<(u32, u32)>>),
    /// Every relation on every non-designated base.
    Sweep,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub signature: Signature,
    pub options: MonadOptions,
    pub catalog: Vec<Type>,
    pub term_bound: usize,
    pub context_bound: usize,
    /// Context bound to escalate to when a verdict at `context_bound` is
    /// unsaturated or would refute completeness. Never below
    /// `context_bound`.
    pub context_limit: usize,
    pub relations: Relations,
    pub seed: u64,
    pub budget: u64,
    /// Syntactic seed size and composed size for the definable search.
    pub definable_seed: usize,
    pub definable_bound: usize,
    /// Largest carrier for the monad-law check.
    pub max_carrier: usize,
}

impl ExperimentConfig {
    /// Desk-scale defaults for a monad.
    pub fn new(monad: MonadKind) -> ExperimentConfig {
        let sig = Signature::default_for(monad);
        ExperimentConfig {
            catalog: default_catalog(&sig),
            signature: sig,
            options: MonadOptions::default(),
            term_bound: 7,
            context_bound: 7,
            context_limit: 11,
            relations: Relations::Identity,
            seed: 0,
            budget: DEFAULT_BUDGET,
            definable_seed: 5,
            definable_bound: 14,
            max_carrier: 6,
        }
    }

    pub fn monad(&self) -> MonadKind {
        self.signature.monad
    }

    pub fn model(&self) -> Result<Model> {
        Ok(Model::new(self.signature.clone(), self.options)?.with_budget(self.budget))
    }

    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let mut sig_lines = Vec::new();
        let mut designated = false;
        let mut monad = MonadKind::Identity;
        let mut rest = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`, got `{line}`", lineno + 1))
            })?;
            let (lhs, rhs) = (lhs.trim(), rhs.trim());
            match lhs {
                "monad" => {
                    monad = rhs.parse()?;
                    sig_lines.push(line.to_string());
                }
                "state-base" | "answer-base" | "exception-base" => {
                    designated = true;
                    sig_lines.push(line.to_string());
                }
                _ if lhs.starts_with("base ") => sig_lines.push(line.to_string()),
                _ => rest.push((lineno + 1, lhs.to_string(), rhs.to_string())),
            }
        }
        let signature = if designated {
            Signature::parse(&sig_lines.join("\n"))?
        } else {
            let extra = Signature::parse(
                &sig_lines
                    .iter()
                    .filter(|l| l.starts_with("base "))
                    .cloned()
                    .collect::<Vec<_>>()
                    .join("\n"),
            )?;
            let mut sig = Signature::default_for(monad);
            sig.bases.extend(extra.bases);
            sig.validate()?;
            sig
        };
        let mut cfg = ExperimentConfig::new(monad);
        cfg.catalog = default_catalog(&signature);
        cfg.signature = signature;
        let mut explicit: BTreeMap<Name, Vec<(u32, u32)>> = BTreeMap::new();
        for (lineno, key, value) in rest {
            let err = |msg: String| Error::Config(format!("line {lineno}: {msg}"));
            let num = |v: &str| -> Result<usize> {
                v.parse().map_err(|_| err(format!("`{key}` expects a number, got `{v}`")))
            };
            let flag = |v: &str| -> Result<bool> {
                match v {
                    "true" | "yes" | "on" => Ok(true),
                    "false" | "no" | "off" => Ok(false),
                    _ => Err(err(format!("`{key}` expects true or false, got `{v}`"))),
                }
            };
            if let Some(base) = key.strip_prefix("relation ") {
                explicit.insert(base.trim().into(), parse_pairs(&value).map_err(err)?);
                continue;
            }
            match key.as_str() {
                "catalog" => {
                    cfg.catalog = value
                        .split(',')
                        .map(|t| Type::parse(t.trim()))
                        .collect::<Result<_>>()?;
                }
                "term-bound" => cfg.term_bound = num(&value)?,
                "context-bound" => cfg.context_bound = num(&value)?,
                "context-limit" => cfg.context_limit = num(&value)?,
                "definable-seed" => cfg.definable_seed = num(&value)?,
                "definable-bound" => cfg.definable_bound = num(&value)?,
                "max-carrier" => cfg.max_carrier = num(&value)?,
                "seed" => cfg.seed = num(&value)? as u64,
                "budget" => cfg.budget = num(&value)? as u64,
                "ccall" => cfg.options.ccall = flag(&value)?,
                "allow-empty" => cfg.options.allow_empty = flag(&value)?,
                "one-sided" => cfg.options.one_sided = flag(&value)?,
                "relations" => {
                    cfg.relations = match value.as_str() {
                        "identity" => Relations::Identity,
                        "sweep" => Relations::Sweep,
                        other => return Err(err(format!("unknown relations mode `{other}`"))),
                    }
                }
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        if !explicit.is_empty() {
            if cfg.relations != Relations::Identity {
                return Err(Error::Config("explicit relations conflict with `relations`".into()));
            }
            cfg.relations = Relations::Explicit(explicit);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.signature.validate()?;
        for t in &self.catalog {
            self.signature.check_type(t)?;
        }
        if self.term_bound == 0 || self.context_bound == 0 {
            return Err(Error::Config("bounds must be at least 1".into()));
        }
        if let Relations::Explicit(m) = &self.relations {
            for (b, pairs) in m {
                let n = self
                    .signature
                    .base_size(b)
                    .ok_or_else(|| Error::Config(format!("relation for undeclared base `{b}`")))?;
                if let Some(&(x, y)) = pairs.iter().find(|&&(x, y)| x >= n || y >= n) {
                    return Err(Error::Config(format!("pair ({x},{y}) outside base `{b}`")));
                }
            }
        }
        Ok(())
    }

    /// The relation families to run under, each with a printable label.
    pub fn families(&self, model: &Model) -> Result<Vec<(String, RelFamily)>> {
        let sig = model.sig();
        match &self.relations {
            Relations::Identity => Ok(vec![("identity".into(), RelFamily::identity(model))]),
            Relations::Explicit(m) => {
                let mut fam = RelFamily::identity(model);
                for (b, pairs) in m {
                    let n = sig.base_size(b).unwrap_or(0) as usize;
                    let r = Rel::from_pairs(n, pairs.iter().map(|&(x, y)| (x as usize, y as usize)))?;
                    fam = fam.with_base(b, r);
                }
                Ok(vec![(relation_label(&fam), fam)])
            }
            Relations::Sweep => {
                let free: Vec<(Name, usize)> = sig
                    .bases
                    .iter()
                    .filter(|(b, _)| !sig.is_designated(b))
                    .map(|(b, &n)| (b.clone(), n as usize))
                    .collect();
                if free.iter().any(|(_, n)| *n > 2) {
                    return Err(Error::Config("relation sweeps need base sizes <= 2".into()));
                }
                let mut out = vec![RelFamily::identity(model)];
                for (b, n) in &free {
                    out = out
                        .into_iter()
                        .flat_map(|fam| Rel::all(*n).map(move |r| fam.clone().with_base(b, r)))
                        .collect();
                }
                Ok(out.into_iter().map(|f| (relation_label(&f), f)).collect())
            }
        }
    }
}

/// Printable summary of the non-identity base relations in a family.
pub fn relation_label(fam: &RelFamily) -> String {
    let parts: Vec<String> = fam
        .base_rels()
        .iter()
        .filter(|(_, r)| !r.is_identity())
        .map(|(b, r)| {
            let pairs: Vec<String> = r.pairs().map(|(x, y)| format!("({x},{y})")).collect();
            format!("{b}:{}", pairs.join(""))
        })
        .collect();
    if parts.is_empty() {
        "identity".into()
    } else {
        parts.join(";")
    }
}

fn parse_pairs(text: &str) -> std::result::Result<Vec<(u32, u32)>, String> {
    let cleaned: String = text.chars().map(|c| if "(),".contains(c) { ' ' } else { c }).collect();
    let nums: Vec<u32> = cleaned
        .split_whitespace()
        .map(|n| n.parse().map_err(|_| format!("bad relation entry `{n}`")))
        .collect::<std::result::Result<_, _>>()?;
    if nums.len() % 2 != 0 {
        return Err(format!("odd number of entries in `{text}`"));
    }
    Ok(nums.chunks(2).map(|c| (c[0], c[1])).collect())
}

/// `bool`, `T bool`, `bool -> T bool`, `bool * bool`, plus `st -> T st`
/// when a state base is designated and `T (T bool)` for non-determinism.
pub fn default_catalog(sig: &Signature) -> Vec<Type> {
    let mut out: Vec<Type> = ["bool", "T bool", "bool -> T bool", "bool * bool"]
        .iter()
        .map(|t| Type::parse(t).expect("catalog type"))
        .collect();
    if let Some(st) = &sig.state_base {
        let s = Type::Base(st.clone());
        out.push(Type::arrow(s.clone(), Type::comp(s)));
    }
    if sig.monad == MonadKind::Nondet {
        out.push(Type::comp(Type::comp(Type::Bool)));
    }
    out
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.signature)?;
        let cat: Vec<String> = self.catalog.iter().map(Type::to_string).collect();
        writeln!(f, "catalog = {}", cat.join(", "))?;
        writeln!(f, "term-bound = {}", self.term_bound)?;
        writeln!(f, "context-bound = {}", self.context_bound)?;
        writeln!(f, "context-limit = {}", self.context_limit)?;
        writeln!(f, "definable-seed = {}", self.definable_seed)?;
        writeln!(f, "definable-bound = {}", self.definable_bound)?;
        writeln!(f, "max-carrier = {}", self.max_carrier)?;
        writeln!(f, "seed = {}", self.seed)?;
        writeln!(f, "budget = {}", self.budget)?;
        writeln!(f, "ccall = {}", self.options.ccall)?;
        writeln!(f, "allow-empty = {}", self.options.allow_empty)?;
        writeln!(f, "one-sided = {}", self.options.one_sided)?;
        match &self.relations {
            Relations::Identity => writeln!(f, "relations = identity"),
            Relations::Sweep => writeln!(f, "relations = sweep"),
            Relations::Explicit(m) => {
                for (b, pairs) in m {
                    let ps: Vec<String> = pairs.iter().map(|(x, y)| format!("({x},{y})")).collect();
                    writeln!(f, "relation {b} = {}", ps.join(" "))?;
                }
                Ok(())
            }
        }
    }
}
