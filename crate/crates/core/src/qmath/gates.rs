//! Built-in gates and states.

use std::f64::consts::FRAC_1_SQRT_2;

use super::CMatrix;

pub fn identity() -> CMatrix {
    CMatrix::identity(2)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap()
}

pub fn hadamard() -> CMatrix {
    let s = FRAC_1_SQRT_2;
    CMatrix::from_real_rows(&[&[s, s], &[s, -s]]).unwrap()
}

/// Control is the first qubit, target the second.
pub fn cnot() -> CMatrix {
    CMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
    .unwrap()
}

/// |+⟩⟨+|.
pub fn plus_state() -> CMatrix {
    CMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap()
}

/// Density operator of the computational basis state with the given index.
pub fn basis_state(dim: usize, index: usize) -> CMatrix {
    CMatrix::basis_op(dim, index, index)
}

/// Looks up a built-in gate by its source-level name.
pub fn builtin(name: &str) -> Option<CMatrix> {
    match name {
        "I" => Some(identity()),
        "X" => Some(pauli_x()),
        "Z" => Some(pauli_z()),
        "H" => Some(hadamard()),
        "CNOT" => Some(cnot()),
        _ => None,
    }
}

pub const BUILTIN_GATES: &[&str] = &["I", "X", "Z", "H", "CNOT"];
