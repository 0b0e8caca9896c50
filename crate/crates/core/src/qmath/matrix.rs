use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use super::{MathError, MathResult};
use crate::EPS_NUM;

pub type C64 = Complex64;

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting shape mismatches and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> MathResult<Self> {
        if rows == 0 || cols == 0 || rows * cols != data.len() {
            return Err(MathError::Shape {
                rows,
                cols,
                len: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(MathError::NonFinite);
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> MathResult<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(MathError::Ragged);
        }
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        CMatrix::from_vec(r, c, data)
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> MathResult<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(MathError::Ragged);
        }
        CMatrix::from_vec(r, c, rows.into_iter().flatten().collect())
    }

    /// Outer product |u⟩⟨v|.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let mut m = CMatrix::zeros(u.len(), v.len());
        for (i, a) in u.iter().enumerate() {
            for (j, b) in v.iter().enumerate() {
                m[(i, j)] = a * b.conj();
            }
        }
        m
    }

    /// |i⟩⟨j| in dimension `n`.
    pub fn basis_op(n: usize, i: usize, j: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        m[(i, j)] = C64::new(1.0, 0.0);
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = CMatrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn matmul(&self, other: &CMatrix) -> MathResult<CMatrix> {
        if self.cols != other.rows {
            return Err(MathError::DimMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let orow = other.row(k);
                let base = i * other.cols;
                for (j, b) in orow.iter().enumerate() {
                    out.data[base + j] += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &CMatrix) -> MathResult<CMatrix> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &CMatrix) -> MathResult<CMatrix> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn add_assign_checked(&mut self, other: &CMatrix) -> MathResult<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }

    pub fn scale(&self, s: f64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_complex(&self, s: C64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_diff(&self, other: &CMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &CMatrix, tol: f64) -> bool {
        self.max_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_diff(&self.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        match self.matmul(&self.adjoint()) {
            Ok(p) => p.approx_eq(&CMatrix::identity(self.rows), tol),
            Err(_) => false,
        }
    }

    /// (A + A†)/2, used to clear rounding noise before eigen-analysis.
    pub fn hermitian_part(&self) -> CMatrix {
        let adj = self.adjoint();
        self.zip_with(&adj, |a, b| (a + b) * 0.5)
    }

    /// Number of qubits if the matrix is 2^k × 2^k.
    pub fn qubit_count(&self) -> Option<usize> {
        if self.is_square() && self.rows.is_power_of_two() {
            Some(self.rows.trailing_zeros() as usize)
        } else {
            None
        }
    }

    fn check_same_shape(&self, other: &CMatrix) -> MathResult<()> {
        if self.rows != other.rows || self.cols != other.cols {
            Err(MathError::DimMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            })
        } else {
            Ok(())
        }
    }

    fn zip_with(&self, other: &CMatrix, f: impl Fn(C64, C64) -> C64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

// Operator sugar panics on shape mismatch; fallible callers use the `try_*`
// and `matmul` methods.
impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        self.try_add(rhs).expect("matrix shapes differ")
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        self.try_sub(rhs).expect("matrix shapes differ")
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("matrix shapes differ")
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CMatrix{}x{} {}", self.rows, self.cols, super::literal::format_exact(self))
    }
}

impl fmt::Display for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::literal::format_fixed(self))
    }
}

/// Tensor product of two matrices.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kron(b)
}

pub fn adjoint(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

/// `m · ρ · m†`.
pub fn conjugate_by(m: &CMatrix, rho: &CMatrix) -> MathResult<CMatrix> {
    if !rho.is_square() || m.cols() != rho.rows() {
        return Err(MathError::DimMismatch {
            left: (m.rows(), m.cols()),
            right: (rho.rows(), rho.cols()),
        });
    }
    m.matmul(rho)?.matmul(&m.adjoint())
}

/// Löwner order `a ⊑ b`: `b − a` is positive semidefinite up to `EPS_NUM`.
pub fn loewner_leq(a: &CMatrix, b: &CMatrix) -> MathResult<bool> {
    if a.rows() != b.rows() || a.cols() != b.cols() || !a.is_square() {
        return Err(MathError::DimMismatch {
            left: (a.rows(), a.cols()),
            right: (b.rows(), b.cols()),
        });
    }
    if !a.is_hermitian(EPS_NUM) || !b.is_hermitian(EPS_NUM) {
        return Err(MathError::NotHermitian);
    }
    let diff = b.try_sub(a)?;
    Ok(super::eigen::min_eigenvalue(&diff.hermitian_part()) >= -EPS_NUM)
}

/// Lifts `op`, acting on `targets` in the listed order, to a register of
/// `total` qubits. Qubit 0 is the leftmost tensor factor, i.e. the most
/// significant bit of a basis index.
pub fn embed(op: &CMatrix, targets: &[usize], total: usize) -> MathResult<CMatrix> {
    let k = targets.len();
    if !op.is_square() || op.rows() != 1usize << k {
        return Err(MathError::ArityMismatch {
            expected: k,
            dim: op.rows(),
        });
    }
    for (n, &t) in targets.iter().enumerate() {
        if t >= total {
            return Err(MathError::TargetOutOfRange { target: t, total });
        }
        if targets[..n].contains(&t) {
            return Err(MathError::DuplicateTarget(t));
        }
    }
    if k == total && targets.iter().enumerate().all(|(i, &t)| i == t) {
        return Ok(op.clone());
    }
    let dim = 1usize << total;
    let shifts: Vec<usize> = targets.iter().map(|&t| total - 1 - t).collect();
    let target_mask: usize = shifts.iter().map(|&s| 1usize << s).sum();
    let sub_index = |full: usize| -> usize {
        shifts
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | ((full >> s) & 1))
    };
    let mut out = CMatrix::zeros(dim, dim);
    for r in 0..dim {
        let rs = sub_index(r);
        let rest = r & !target_mask;
        for cs in 0..(1usize << k) {
            let v = op[(rs, cs)];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            // Rebuild the full column index from the untouched bits of `r`
            // and the sub-index `cs`.
            let mut c = rest;
            for (n, &s) in shifts.iter().enumerate() {
                if (cs >> (k - 1 - n)) & 1 == 1 {
                    c |= 1 << s;
                }
            }
            out[(r, c)] = v;
        }
    }
    Ok(out)
}
