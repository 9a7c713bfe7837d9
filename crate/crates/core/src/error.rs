use thiserror::Error;

use crate::syntax::Type;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("application of a non-function of type `{0}`")]
    NotArrow(Type),
    #[error("argument mismatch: expected `{expected}`, found `{found}`")]
    ArgMismatch { expected: Type, found: Type },
    #[error("`let` binds a non-computation of type `{0}`")]
    NotComp(Type),
    #[error("`let` body has non-computation type `{0}`")]
    LetBodyNotComp(Type),
    #[error("projection from a non-product of type `{0}`")]
    NotProd(Type),
    #[error("condition has type `{0}`, expected `bool`")]
    CondNotBool(Type),
    #[error("branches disagree: `{0}` vs `{1}`")]
    BranchMismatch(Type, Type),
    #[error("unknown constant `{0}` for the active monad")]
    UnknownConst(String),
    #[error("constant `{name}` expects {expected} type argument(s), got {found}")]
    ConstArity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown base type `{0}`")]
    UnknownBase(String),
    #[error("literal `{base}#{index}` out of range or base not designated")]
    BadLiteral { base: String, index: u32 },
    #[error("hole outside of a context")]
    StrayHole,
    #[error("context result type `{found}` differs from expected `{expected}`")]
    ResultMismatch { expected: Type, found: Type },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("type error: {0}")]
    Type(#[from] TypeError),
    #[error("carrier budget exceeded: `{what}` needs {size} elements (budget {budget})")]
    Budget {
        what: String,
        size: String,
        budget: u64,
    },
    #[error("context must contain exactly one hole, found {0}")]
    HoleCount(usize),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("relation error: {0}")]
    Relation(String),
    #[error("internal evaluation error: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}
