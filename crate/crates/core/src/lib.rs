//! A finite-model workbench for the computational lambda-calculus.
//!
//! Terms are interpreted in small set-theoretic models over a chosen monad.
//! On top of the evaluator sit type-indexed logical relations, bounded
//! contextual equivalence by context enumeration, and the experiments that
//! compare the two.

pub mod config;
pub mod ctxequiv;
pub mod definable;
pub mod enumerate;
pub mod error;
pub mod experiments;
pub mod laws;
pub mod logrel;
pub mod monads;
pub mod parse;
pub mod report;
pub mod semantics;
pub mod signature;
pub mod syntax;
pub mod typing;

pub use ctxequiv::{ctx_equiv, stabilization_scan, ContextSuite, ObservationTable, Verdict};
pub use enumerate::{enumerate_contexts, enumerate_terms, type_universe, Enumerator};
pub use error::{Error, Result, TypeError};
pub use logrel::{basic_lemma_check, related, BasicLemma, Rel, RelFamily};
pub use monads::{MonadKind, MonadOptions};
pub use parse::{parse_file, parse_term};
pub use semantics::{Carrier, Elem, Model, MonV};
pub use signature::Signature;
pub use syntax::{plug, Context, Name, Term, Type};
pub use typing::{check_context, infer, TypeCtx};
