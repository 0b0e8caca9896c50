use super::{eigen, CMatrix, MathError, MathResult};
use crate::EPS_NUM;

/// A positive semidefinite operator with trace at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialDensityOp {
    mat: CMatrix,
}

impl PartialDensityOp {
    /// Validates Hermiticity, positivity and the trace bound.
    pub fn new(mat: CMatrix) -> MathResult<Self> {
        if mat.qubit_count().is_none() {
            return Err(MathError::NotQubitSquare(mat.rows(), mat.cols()));
        }
        if !mat.is_hermitian(EPS_NUM) {
            return Err(MathError::NotHermitian);
        }
        let tr = mat.trace().re;
        if tr > 1.0 + EPS_NUM {
            return Err(MathError::TraceExceeded(tr));
        }
        let min = eigen::min_eigenvalue(&mat);
        if min < -EPS_NUM {
            return Err(MathError::NotPositive(min));
        }
        Ok(PartialDensityOp { mat })
    }

    /// Wraps a matrix produced by trace-non-increasing operations on valid
    /// inputs. No checks.
    pub fn from_matrix_unchecked(mat: CMatrix) -> Self {
        PartialDensityOp { mat }
    }

    pub fn zero(dim: usize) -> Self {
        PartialDensityOp {
            mat: CMatrix::zeros(dim, dim),
        }
    }

    /// |i⟩⟨i| for a computational basis index.
    pub fn basis(dim: usize, index: usize) -> Self {
        PartialDensityOp {
            mat: CMatrix::basis_op(dim, index, index),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Re-runs the invariant checks (used by the structural test suites).
    pub fn check(&self) -> MathResult<()> {
        PartialDensityOp::new(self.mat.clone()).map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryGate {
    arity: usize,
    mat: CMatrix,
}

impl UnitaryGate {
    pub fn new(mat: CMatrix) -> MathResult<Self> {
        let arity = mat
            .qubit_count()
            .ok_or(MathError::NotQubitSquare(mat.rows(), mat.cols()))?;
        if !mat.is_unitary(EPS_NUM) {
            return Err(MathError::NotUnitary);
        }
        Ok(UnitaryGate { arity, mat })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }
}

/// Measurement outcome label; composed measurements pair labels, so a label
/// is a list of integers.
pub type Label = Vec<i64>;

/// Measurement operators with a labelling of their indices.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralMeasurement {
    arity: usize,
    ops: Vec<CMatrix>,
    labels: Vec<Label>,
}

impl GeneralMeasurement {
    /// Measurement with the identity labelling `i ↦ [i]`.
    pub fn new(ops: Vec<CMatrix>) -> MathResult<Self> {
        let labels = (0..ops.len() as i64).map(|i| vec![i]).collect();
        GeneralMeasurement::with_labels(ops, labels)
    }

    /// Builds a measurement without checking completeness. Shapes must agree
    /// and every operator must carry a label.
    pub fn with_labels(ops: Vec<CMatrix>, labels: Vec<Label>) -> MathResult<Self> {
        let first = ops.first().ok_or(MathError::EmptyMeasurement)?;
        let arity = first
            .qubit_count()
            .ok_or(MathError::NotQubitSquare(first.rows(), first.cols()))?;
        if ops.iter().any(|m| m.rows() != first.rows() || m.cols() != first.cols()) {
            return Err(MathError::DimMismatch {
                left: (first.rows(), first.cols()),
                right: ops
                    .iter()
                    .find(|m| m.rows() != first.rows() || m.cols() != first.cols())
                    .map(|m| (m.rows(), m.cols()))
                    .unwrap_or_default(),
            });
        }
        if labels.len() != ops.len() {
            return Err(MathError::LabelCount {
                ops: ops.len(),
                labels: labels.len(),
            });
        }
        if let Some(w) = labels.first().map(Vec::len) {
            if labels.iter().any(|l| l.len() != w) {
                return Err(MathError::LabelWidth);
            }
        }
        Ok(GeneralMeasurement { arity, ops, labels })
    }

    /// Like [`GeneralMeasurement::with_labels`] but also requires completeness.
    pub fn complete(ops: Vec<CMatrix>, labels: Vec<Label>) -> MathResult<Self> {
        let m = GeneralMeasurement::with_labels(ops, labels)?;
        if !check_measurement(&m) {
            return Err(MathError::Incomplete);
        }
        Ok(m)
    }

    /// Computational-basis measurement of `arity` qubits, outcome `i ↦ [i]`.
    pub fn computational(arity: usize) -> Self {
        let dim = 1usize << arity;
        let ops = (0..dim).map(|i| CMatrix::basis_op(dim, i, i)).collect();
        GeneralMeasurement::new(ops).expect("basis projectors are well-formed")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label_width(&self) -> usize {
        self.labels.first().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CMatrix, &Label)> {
        self.ops.iter().zip(&self.labels)
    }

    /// `Σ_i M_i† M_i`.
    pub fn effect_sum(&self) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim(), self.dim());
        for m in &self.ops {
            let e = m.adjoint().matmul(m).expect("square operators");
            acc.add_assign_checked(&e).expect("same dimension");
        }
        acc
    }
}

/// True iff `Σ_i M_i† M_i = I` within `EPS_NUM`.
pub fn check_measurement(m: &GeneralMeasurement) -> bool {
    m.effect_sum()
        .approx_eq(&CMatrix::identity(m.dim()), EPS_NUM)
}
