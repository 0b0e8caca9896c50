//! Fixtures shared by the benchmarks.

use qimp_core::assertlang::{parse_assertion, DistAssn};
use qimp_core::lang::{parse_program, Program};
use qimp_core::state::{ClassicalState, Povd};
use qimp_core::witness::basis_witness;

pub const SUPERDENSE: &str = include_str!("../../../programs/sc.qimp");
pub const SUPERDENSE_POST: &str = "box(x0 = y0 && x1 = y1)";

pub fn superdense() -> Program {
    parse_program(SUPERDENSE).expect("bundled program parses")
}

pub fn superdense_post() -> DistAssn {
    parse_assertion(SUPERDENSE_POST, &[]).expect("bundled assertion parses")
}

/// `(σ, |00⟩⟨00|)` with `x0`, `x1` set from the two bits of `bits`.
pub fn superdense_input(bits: u8) -> Povd {
    let mut sigma = ClassicalState::new();
    sigma.set("x0", i64::from(bits >> 1 & 1));
    sigma.set("x1", i64::from(bits & 1));
    basis_witness(&superdense().qubits, sigma, 0).expect("two-qubit witness")
}
