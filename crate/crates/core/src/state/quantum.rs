//! The quantum actions shared by both semantics, on a named register.

use crate::qmath::{conjugate_by, embed, CMatrix, GeneralMeasurement, Label};
use crate::{Error, Result};

/// Positions of `names` in `register`.
pub fn qubit_indices(register: &[String], names: &[String]) -> Result<Vec<usize>> {
    names
        .iter()
        .map(|q| {
            register
                .iter()
                .position(|r| r == q)
                .ok_or_else(|| Error::UnknownQubit(q.clone()))
        })
        .collect()
}

/// `|0⟩_q⟨0|ρ|0⟩_q⟨0| + |0⟩_q⟨1|ρ|1⟩_q⟨0|`
pub fn reset(rho: &CMatrix, register: &[String], q: &str) -> Result<CMatrix> {
    let idx = qubit_indices(register, &[q.to_string()])?;
    let n = register.len();
    let k0 = embed(&CMatrix::basis_op(2, 0, 0), &idx, n)?;
    let k1 = embed(&CMatrix::basis_op(2, 0, 1), &idx, n)?;
    let mut out = conjugate_by(&k0, rho)?;
    out.add_assign_checked(&conjugate_by(&k1, rho)?)?;
    Ok(out)
}

pub fn apply_unitary(rho: &CMatrix, u: &CMatrix, register: &[String], qs: &[String]) -> Result<CMatrix> {
    let idx = qubit_indices(register, qs)?;
    let full = embed(u, &idx, register.len())?;
    Ok(conjugate_by(&full, rho)?)
}

/// One `(label, M_i ρ M_i†)` pair per operator, in operator order.
pub fn measure(
    rho: &CMatrix,
    m: &GeneralMeasurement,
    register: &[String],
    qs: &[String],
) -> Result<Vec<(Label, CMatrix)>> {
    let idx = qubit_indices(register, qs)?;
    m.iter()
        .map(|(op, label)| {
            let full = embed(op, &idx, register.len())?;
            Ok((label.clone(), conjugate_by(&full, rho)?))
        })
        .collect()
}

/// The integer written to the target variable for a program measurement.
pub fn outcome_value(label: &Label) -> Result<i64> {
    match label.as_slice() {
        [v] => Ok(*v),
        _ => Err(Error::InvalidArgument(format!(
            "measurement label {label:?} does not fit a single variable"
        ))),
    }
}
