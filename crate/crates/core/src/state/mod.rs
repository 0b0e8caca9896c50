//! Classical states, configurations and POVDs.

mod cstate;
mod povd;
pub mod quantum;

pub use cstate::{update, ClassicalState};
pub use povd::{povd_add, povd_eq, restrict, total_mass, Povd};

use crate::lang::Com;
use crate::qmath::PartialDensityOp;

/// `⟨c, σ, ρ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub command: Com,
    pub sigma: ClassicalState,
    pub rho: PartialDensityOp,
}

impl Configuration {
    pub fn new(command: Com, sigma: ClassicalState, rho: PartialDensityOp) -> Self {
        Configuration { command, sigma, rho }
    }
}
