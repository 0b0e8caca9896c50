use thiserror::Error;

use crate::lang::ParseError;
use crate::qmath::MathError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Math(#[from] MathError),
    #[error("integer overflow evaluating `{0}`")]
    Overflow(String),
    #[error("qubit `{0}` is not in the register")]
    UnknownQubit(String),
    #[error("registers differ: {left:?} vs {right:?}")]
    RegisterMismatch { left: Vec<String>, right: Vec<String> },
    #[error("total mass {0} exceeds 1")]
    MassOverflow(f64),
    #[error("entry has dimension {found}, register needs {expected}")]
    EntryDim { expected: usize, found: usize },
    #[error("invalid state file: {0}")]
    Json(String),
    #[error("`nil` has no transitions")]
    SteppingNil,
    #[error("{0}")]
    InvalidArgument(String),
    #[error("{0}")]
    KindMismatch(String),
    #[error("substituting for `{0}` would capture a bound variable")]
    Capture(String),
    #[error("the precondition calculus does not handle loops: {0}")]
    LoopInPc(String),
    #[error("pc(abort, P) is only defined for P = box(false)")]
    AbortPost,
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
