//! Classical-quantum imperative programs: semantics, assertions and a
//! precondition calculus.

pub mod assertlang;
pub mod densem;
mod error;
pub mod lang;
pub mod opsem;
pub mod qmath;
pub mod state;
pub mod witness;
pub mod wp;

pub use error::{Error, Result};

/// Tolerance for matrix equality, positivity and completeness checks.
pub const EPS_NUM: f64 = 1e-9;
/// Entries of a distribution with smaller trace are dropped.
pub const EPS_PRUNE: f64 = 1e-12;
