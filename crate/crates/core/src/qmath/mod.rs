//! Dense complex linear algebra, density operators, gates and general
//! measurements.

pub mod eigen;
pub mod gates;
pub mod literal;
mod matrix;
mod operators;

pub use matrix::{adjoint, conjugate_by, embed, loewner_leq, tensor, CMatrix, C64};
pub use operators::{check_measurement, GeneralMeasurement, Label, PartialDensityOp, UnitaryGate};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MathError {
    #[error("matrix shape {rows}x{cols} does not match {len} entries")]
    Shape { rows: usize, cols: usize, len: usize },
    #[error("matrix rows have different lengths")]
    Ragged,
    #[error("matrix entry is NaN or infinite")]
    NonFinite,
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("matrix is not unitary")]
    NotUnitary,
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("trace {0} exceeds 1")]
    TraceExceeded(f64),
    #[error("{0}x{1} is not a 2^k square matrix")]
    NotQubitSquare(usize, usize),
    #[error("operator of dimension {dim} cannot act on {expected} qubit(s)")]
    ArityMismatch { expected: usize, dim: usize },
    #[error("target qubit {target} out of range for {total} qubit(s)")]
    TargetOutOfRange { target: usize, total: usize },
    #[error("qubit {0} listed twice")]
    DuplicateTarget(usize),
    #[error("measurement has no operators")]
    EmptyMeasurement,
    #[error("{ops} measurement operators but {labels} labels")]
    LabelCount { ops: usize, labels: usize },
    #[error("measurement labels have different widths")]
    LabelWidth,
    #[error("measurement operators do not satisfy the completeness equation")]
    Incomplete,
    #[error("matrix literal at offset {offset}: {msg}")]
    Literal { offset: usize, msg: String },
}

pub type MathResult<T> = Result<T, MathError>;
