//! `mew`: command-line driver for the workbench.
//!
//! Exit codes: 0 success, 1 claim violation, 2 usage, configuration, parse
//! or type error, 3 carrier budget exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use mew::config::ExperimentConfig;
use mew::experiments::{find_nondet_counterexample, run_completeness, run_soundness};
use mew::laws::run_laws;
use mew::report::{Record, Report};
use mew::{ctx_equiv, infer, parse_file, related, Error, MonadKind, Term, Type, TypeCtx, Verdict};

#[derive(Parser)]
#[command(name = "mew", version, about = "Finite-model workbench for the computational lambda-calculus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse terms and print them back.
    Parse(Inputs),
    /// Infer the type of each term.
    Typecheck(Inputs),
    /// Evaluate a closed term in the finite model.
    Eval(Inputs),
    /// Decide whether two closed terms are logically related.
    Relate(Inputs),
    /// Bounded contextual equivalence of two closed terms.
    Ctxeq(Inputs),
    /// Check the three monad laws on small carriers.
    Laws(Opts),
    /// Related pairs are never distinguished by a context.
    Soundness(Opts),
    /// Equivalent pairs at first-order types are related.
    Completeness(Opts),
    /// Search for an equivalent but unrelated pair.
    Counterexample(Opts),
}

#[derive(Args)]
struct Opts {
    /// Signature file (`base b = 2`, `monad = state`, `state-base = b`, ...).
    #[arg(long)]
    sig: Option<PathBuf>,
    /// Experiment configuration file (flat `key = value`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// identity, partiality, exceptions, state, nondet or continuation.
    #[arg(long)]
    monad: Option<String>,
    /// Context size bound.
    #[arg(long)]
    bound: Option<usize>,
    /// Term size bound.
    #[arg(long)]
    term_bound: Option<usize>,
    /// Enable call/cc under the continuation monad.
    #[arg(long)]
    ccall: bool,
    /// Allow the empty set under non-determinism.
    #[arg(long)]
    allow_empty: bool,
    /// One-sided relational lifting for non-determinism.
    #[arg(long)]
    one_sided: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Largest carrier for the law check.
    #[arg(long)]
    max_carrier: Option<usize>,
    /// Carrier budget.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct Inputs {
    #[command(flatten)]
    opts: Opts,
    /// Type to check the terms against.
    #[arg(long = "type")]
    ty: Option<String>,
    /// Term files, or term text when no such file exists.
    #[arg(required = true)]
    terms: Vec<String>,
}

/// Failures, mapped onto exit codes.
enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Core(e)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

impl Opts {
    fn explicit_monad(&self) -> Result<Option<MonadKind>, Failure> {
        Ok(self.monad.as_deref().map(str::parse).transpose()?)
    }

    fn config(&self) -> Result<ExperimentConfig, Failure> {
        let mut text = String::new();
        if let Some(p) = &self.config {
            text.push_str(&read(p)?);
            text.push('\n');
        }
        if let Some(p) = &self.sig {
            text.push_str(&read(p)?);
            text.push('\n');
        }
        if let Some(m) = self.explicit_monad()? {
            text = text
                .lines()
                .filter(|l| l.split_once('=').map_or(true, |(k, _)| k.trim() != "monad"))
                .map(|l| format!("{l}\n"))
                .collect();
            text.push_str(&format!("monad = {m}\n"));
        }
        let mut cfg = ExperimentConfig::parse(&text)?;
        if let Some(b) = self.bound {
            cfg.context_bound = b;
            cfg.context_limit = cfg.context_limit.max(b);
        }
        if let Some(b) = self.term_bound {
            cfg.term_bound = b;
        }
        cfg.options.ccall |= self.ccall;
        cfg.options.allow_empty |= self.allow_empty;
        cfg.options.one_sided |= self.one_sided;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(m) = self.max_carrier {
            cfg.max_carrier = m;
        }
        if let Some(b) = self.budget {
            cfg.budget = b;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Every binding of every input; a plain argument that names no file is
/// read as term text.
fn load_terms(inputs: &Inputs, cfg: &ExperimentConfig) -> Result<Vec<Vec<(String, Term)>>, Failure> {
    inputs
        .terms
        .iter()
        .map(|arg| {
            let path = Path::new(arg);
            let text = if path.is_file() { read(path)? } else { arg.clone() };
            Ok(parse_file(&text, &cfg.signature)?)
        })
        .collect()
}

/// The program of each input: its last binding.
fn programs(inputs: &Inputs, cfg: &ExperimentConfig) -> Result<Vec<Term>, Failure> {
    Ok(load_terms(inputs, cfg)?
        .into_iter()
        .map(|mut bs| bs.pop().expect("at least one binding").1)
        .collect())
}

fn closed_type(t: &Term, inputs: &Inputs, cfg: &ExperimentConfig) -> Result<Type, Failure> {
    let ty = infer(&TypeCtx::new(), t, &cfg.signature)?;
    if let Some(want) = &inputs.ty {
        let want = Type::parse(want)?;
        if want != ty {
            return Err(Failure::Usage(format!("term has type {ty}, not {want}")));
        }
    }
    Ok(ty)
}

fn two<T>(mut v: Vec<T>) -> Result<(T, T), Failure> {
    if v.len() != 2 {
        return Err(Failure::Usage(format!("expected two terms, got {}", v.len())));
    }
    let b = v.pop().expect("two");
    Ok((v.pop().expect("two"), b))
}

fn run(command: Command) -> Result<Report, Failure> {
    let mut report = Report::default();
    match command {
        Command::Parse(inputs) => {
            let cfg = inputs.opts.config()?;
            for bindings in load_terms(&inputs, &cfg)? {
                for (name, t) in bindings {
                    report.push(Record::default().with("name", name).with("term", t));
                }
            }
        }
        Command::Typecheck(inputs) => {
            let cfg = inputs.opts.config()?;
            for bindings in load_terms(&inputs, &cfg)? {
                for (name, t) in bindings {
                    let ty = closed_type(&t, &inputs, &cfg)?;
                    report.push(Record::default().with("name", name).with("type", ty));
                }
            }
        }
        Command::Eval(inputs) => {
            let cfg = inputs.opts.config()?;
            let model = cfg.model()?;
            for t in programs(&inputs, &cfg)? {
                closed_type(&t, &inputs, &cfg)?;
                report.push(Record::default().with("result", model.eval_closed(&t)?));
            }
        }
        Command::Relate(inputs) => {
            let cfg = inputs.opts.config()?;
            let model = cfg.model()?;
            let (m, n) = two(programs(&inputs, &cfg)?)?;
            let ty = closed_type(&m, &inputs, &cfg)?;
            for (label, fam) in cfg.families(&model)? {
                let r = related(&m, &n, &ty, &fam, &model)?;
                report.push(
                    Record::default().with("related", r).with("type", &ty).with("relations", label),
                );
            }
        }
        Command::Ctxeq(inputs) => {
            let cfg = inputs.opts.config()?;
            let model = cfg.model()?;
            let (m, n) = two(programs(&inputs, &cfg)?)?;
            let ty = closed_type(&m, &inputs, &cfg)?;
            let bound = cfg.context_bound;
            match ctx_equiv(&m, &n, &ty, bound, &model)? {
                Verdict::Equivalent { bound } => {
                    report.push(Record::default().with("status", "equivalent").with("bound", bound))
                }
                Verdict::Distinguished { witness, left, right } => report.violation(
                    Record::default()
                        .with("status", "distinguished")
                        .with("bound", bound)
                        .with("witness", witness)
                        .with("left", left)
                        .with("right", right),
                ),
            }
        }
        Command::Laws(opts) => {
            let cfg = opts.config()?;
            let monads = match opts.explicit_monad()? {
                Some(m) => vec![m],
                None if opts.sig.is_some() || opts.config.is_some() => vec![cfg.monad()],
                None => MonadKind::ALL.to_vec(),
            };
            for m in monads {
                report.extend(run_laws(m, cfg.options, cfg.max_carrier, cfg.seed)?);
            }
        }
        Command::Soundness(opts) => report = run_soundness(&opts.config()?)?,
        Command::Completeness(opts) => report = run_completeness(&opts.config()?)?,
        Command::Counterexample(opts) => report = find_nondet_counterexample(&opts.config()?)?,
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    match run(cli.command) {
        Ok(report) => {
            print!("{}", report.render());
            eprintln!("elapsed={:.3}s", start.elapsed().as_secs_f64());
            if report.violations > 0 {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget() { 3 } else { 2 })
        }
    }
}
