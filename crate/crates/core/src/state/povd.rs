use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ClassicalState;
use crate::lang::BExp;
use crate::qmath::literal::{format_exact, format_fixed, parse_matrix};
use crate::qmath::{CMatrix, PartialDensityOp};
use crate::{opsem, Error, Result, EPS_NUM, EPS_PRUNE};

/// Partial-density-operator valued distribution over a named register.
#[derive(Debug, Clone, PartialEq)]
pub struct Povd {
    qubits: Vec<String>,
    entries: BTreeMap<ClassicalState, PartialDensityOp>,
}

impl Povd {
    /// The distribution with empty support.
    pub fn empty(qubits: Vec<String>) -> Self {
        Povd {
            qubits,
            entries: BTreeMap::new(),
        }
    }

    pub fn point(qubits: Vec<String>, sigma: ClassicalState, rho: PartialDensityOp) -> Result<Self> {
        Povd::from_entries(qubits, [(sigma, rho.into_matrix())])
    }

    /// Validates every matrix and the total mass; sums repeated states.
    pub fn from_entries(
        qubits: Vec<String>,
        entries: impl IntoIterator<Item = (ClassicalState, CMatrix)>,
    ) -> Result<Self> {
        let mut p = Povd::empty(qubits);
        for (s, m) in entries {
            PartialDensityOp::new(m.clone())?;
            p.accumulate(s, m)?;
        }
        p.prune();
        p.check_invariants()?;
        Ok(p)
    }

    /// Adds `m` at `sigma` without validating positivity or mass.
    pub fn accumulate(&mut self, sigma: ClassicalState, m: CMatrix) -> Result<()> {
        if m.rows() != self.dim() || m.cols() != self.dim() {
            return Err(Error::EntryDim {
                expected: self.dim(),
                found: m.rows(),
            });
        }
        match self.entries.get_mut(&sigma) {
            Some(e) => {
                let mut sum = e.matrix().clone();
                sum.add_assign_checked(&m)?;
                *e = PartialDensityOp::from_matrix_unchecked(sum);
            }
            None => {
                self.entries
                    .insert(sigma, PartialDensityOp::from_matrix_unchecked(m));
            }
        }
        Ok(())
    }

    /// Drops entries whose trace is below the pruning threshold.
    pub fn prune(&mut self) {
        self.entries.retain(|_, r| r.trace() >= EPS_PRUNE);
    }

    pub fn qubits(&self) -> &[String] {
        &self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits.len()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, sigma: &ClassicalState) -> Option<&PartialDensityOp> {
        self.entries.get(sigma)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ClassicalState, &PartialDensityOp)> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &ClassicalState> {
        self.entries.keys()
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.values().map(PartialDensityOp::trace).sum()
    }

    /// `Σ_σ μ(σ)`.
    pub fn combined(&self) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim(), self.dim());
        for r in self.entries.values() {
            acc.add_assign_checked(r.matrix()).expect("entries share the register dimension");
        }
        acc
    }

    fn same_register(&self, other: &Povd) -> Result<()> {
        if self.qubits != other.qubits {
            return Err(Error::RegisterMismatch {
                left: self.qubits.clone(),
                right: other.qubits.clone(),
            });
        }
        Ok(())
    }

    /// Pointwise sum; fails if the result carries more than unit mass.
    pub fn add(&self, other: &Povd) -> Result<Povd> {
        let sum = self.add_unbounded(other)?;
        let mass = sum.total_mass();
        if mass > 1.0 + EPS_NUM {
            return Err(Error::MassOverflow(mass));
        }
        Ok(sum)
    }

    /// Pointwise sum without the mass bound, for intermediate values.
    pub fn add_unbounded(&self, other: &Povd) -> Result<Povd> {
        self.same_register(other)?;
        let mut out = self.clone();
        for (s, r) in &other.entries {
            out.accumulate(s.clone(), r.matrix().clone())?;
        }
        out.prune();
        Ok(out)
    }

    pub fn restrict_by(&self, mut keep: impl FnMut(&ClassicalState) -> Result<bool>) -> Result<Povd> {
        let mut out = Povd::empty(self.qubits.clone());
        for (s, r) in &self.entries {
            if keep(s)? {
                out.entries.insert(s.clone(), r.clone());
            }
        }
        Ok(out)
    }

    /// `μ|b`.
    pub fn restrict(&self, b: &BExp) -> Result<Povd> {
        self.restrict_by(|s| opsem::eval_bexp(b, s))
    }

    pub fn scale(&self, p: f64) -> Povd {
        let mut out = Povd::empty(self.qubits.clone());
        for (s, r) in &self.entries {
            out.entries
                .insert(s.clone(), PartialDensityOp::from_matrix_unchecked(r.matrix().scale(p)));
        }
        out.prune();
        out
    }

    /// Summed per-state max-norm distance; infinite across registers.
    pub fn distance(&self, other: &Povd) -> f64 {
        if self.qubits != other.qubits {
            return f64::INFINITY;
        }
        let zero = CMatrix::zeros(self.dim(), self.dim());
        let mut keys: Vec<&ClassicalState> = self.entries.keys().collect();
        keys.extend(other.entries.keys().filter(|k| !self.entries.contains_key(*k)));
        keys.into_iter()
            .map(|k| {
                let a = self.entries.get(k).map_or(&zero, |r| r.matrix());
                let b = other.entries.get(k).map_or(&zero, |r| r.matrix());
                a.max_diff(b)
            })
            .sum()
    }

    /// Entrywise comparison per classical state; absent states are zero.
    pub fn approx_eq(&self, other: &Povd, tol: f64) -> bool {
        if self.qubits != other.qubits {
            return false;
        }
        let zero = CMatrix::zeros(self.dim(), self.dim());
        let keys = self.entries.keys().chain(other.entries.keys());
        keys.into_iter().all(|k| {
            let a = self.entries.get(k).map_or(&zero, |r| r.matrix());
            let b = other.entries.get(k).map_or(&zero, |r| r.matrix());
            a.max_diff(b) <= tol
        })
    }

    /// Every entry a valid partial density operator of the register's
    /// dimension, no entry below the pruning threshold, mass at most one.
    pub fn check_invariants(&self) -> Result<()> {
        for r in self.entries.values() {
            if r.dim() != self.dim() {
                return Err(Error::EntryDim {
                    expected: self.dim(),
                    found: r.dim(),
                });
            }
            r.check()?;
            if r.trace() < EPS_PRUNE {
                return Err(Error::InvalidArgument(format!(
                    "stored entry has negligible trace {:e}",
                    r.trace()
                )));
            }
        }
        let mass = self.total_mass();
        if mass > 1.0 + EPS_NUM {
            return Err(Error::MassOverflow(mass));
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let file = PovdFile {
            qubits: self.qubits.clone(),
            entries: self
                .entries
                .iter()
                .map(|(s, r)| EntryFile {
                    cstate: s.clone(),
                    rho: format_exact(r.matrix()),
                })
                .collect(),
        };
        serde_json::to_value(file).expect("plain data serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Povd> {
        let file: PovdFile =
            serde_json::from_value(value.clone()).map_err(|e| Error::Json(e.to_string()))?;
        let mut entries = Vec::with_capacity(file.entries.len());
        for e in file.entries {
            let m = parse_matrix(&e.rho)?;
            entries.push((e.cstate, m));
        }
        Povd::from_entries(file.qubits, entries)
    }

    pub fn from_json_str(text: &str) -> Result<Povd> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
        Povd::from_json(&v)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PovdFile {
    qubits: Vec<String>,
    entries: Vec<EntryFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryFile {
    #[serde(default)]
    cstate: ClassicalState,
    rho: String,
}

impl fmt::Display for Povd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "ε");
        }
        for (i, (s, r)) in self.entries.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{s} -> {}", format_fixed(r.matrix()))?;
        }
        Ok(())
    }
}

pub fn povd_add(m1: &Povd, m2: &Povd) -> Result<Povd> {
    m1.add(m2)
}

pub fn restrict(m: &Povd, b: &BExp) -> Result<Povd> {
    m.restrict(b)
}

pub fn total_mass(m: &Povd) -> f64 {
    m.total_mass()
}

pub fn povd_eq(m1: &Povd, m2: &Povd, tol: f64) -> bool {
    m1.approx_eq(m2, tol)
}
