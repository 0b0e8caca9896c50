//! Meaning of assertions: state level over one classical state,
//! distribution level over a POVD.

use serde::Serialize;

use super::ast::{CmpOp, DistAssn, DistExpr, Quant, StateAssn, StateExpr};
use super::subst::instantiate;
use crate::qmath::{conjugate_by, embed, CMatrix, GeneralMeasurement};
use crate::state::{quantum, ClassicalState, Povd};
use crate::{Error, Result, EPS_NUM};

/// Kleene truth values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    True,
    False,
    Indeterminate,
}

impl Truth {
    pub fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Indeterminate,
        }
    }

    pub fn or(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::True, _) | (_, Truth::True) => Truth::True,
            (Truth::False, Truth::False) => Truth::False,
            _ => Truth::Indeterminate,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Indeterminate => Truth::Indeterminate,
        }
    }

    pub fn implies(self, other: Truth) -> Truth {
        self.not().or(other)
    }

    pub fn is_true(self) -> bool {
        self == Truth::True
    }
}

impl From<bool> for Truth {
    fn from(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }
}

impl std::fmt::Display for Truth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Truth::True => "true",
            Truth::False => "false",
            Truth::Indeterminate => "indeterminate",
        })
    }
}

fn overflow(e: &StateExpr) -> Error {
    Error::Overflow(e.to_string())
}

pub fn eval_state_expr(e: &StateExpr, sigma: &ClassicalState) -> Result<i64> {
    match e {
        StateExpr::Int(n) => Ok(*n),
        StateExpr::Var(x) => Ok(sigma.get(x)),
        StateExpr::Ind(p) => Ok(eval_state_assn(p, sigma)? as i64),
        StateExpr::Add(l, r) => eval_state_expr(l, sigma)?
            .checked_add(eval_state_expr(r, sigma)?)
            .ok_or_else(|| overflow(e)),
        StateExpr::Sub(l, r) => eval_state_expr(l, sigma)?
            .checked_sub(eval_state_expr(r, sigma)?)
            .ok_or_else(|| overflow(e)),
        StateExpr::Mul(l, r) => eval_state_expr(l, sigma)?
            .checked_mul(eval_state_expr(r, sigma)?)
            .ok_or_else(|| overflow(e)),
    }
}

fn int_cmp(l: i64, op: CmpOp, r: i64) -> bool {
    match op {
        CmpOp::Eq => l == r,
        CmpOp::Lt => l < r,
        CmpOp::Le => l <= r,
    }
}

pub fn eval_state_assn(p: &StateAssn, sigma: &ClassicalState) -> Result<bool> {
    Ok(match p {
        StateAssn::Bool(b) => *b,
        StateAssn::Cmp(l, op, r) => int_cmp(eval_state_expr(l, sigma)?, *op, eval_state_expr(r, sigma)?),
        StateAssn::Not(q) => !eval_state_assn(q, sigma)?,
        StateAssn::And(l, r) => eval_state_assn(l, sigma)? && eval_state_assn(r, sigma)?,
        StateAssn::Or(l, r) => eval_state_assn(l, sigma)? || eval_state_assn(r, sigma)?,
        StateAssn::Implies(l, r) => !eval_state_assn(l, sigma)? || eval_state_assn(r, sigma)?,
        StateAssn::Quant { q, var, lo, hi, body } => {
            let mut acc = *q == Quant::Forall;
            for n in *lo..=*hi {
                let v = eval_state_assn(body, &sigma.update(var, n))?;
                match q {
                    Quant::Forall if !v => {
                        acc = false;
                        break;
                    }
                    Quant::Exists if v => {
                        acc = true;
                        break;
                    }
                    _ => {}
                }
            }
            acc
        }
    })
}

/// Value of a distribution expression.
#[derive(Debug, Clone, PartialEq)]
pub enum DistValue {
    Scalar(f64),
    Op(CMatrix),
}

impl DistValue {
    pub fn as_op(&self) -> Option<&CMatrix> {
        match self {
            DistValue::Op(m) => Some(m),
            DistValue::Scalar(_) => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            DistValue::Scalar(_) => "scalar",
            DistValue::Op(_) => "operator",
        }
    }
}

/// The operators of `m` acting on `qubits`, lifted to the register of `mu`.
fn embedded_ops(m: &GeneralMeasurement, qubits: &[String], register: &[String]) -> Result<Vec<CMatrix>> {
    let idx = quantum::qubit_indices(register, qubits)?;
    m.ops()
        .iter()
        .map(|op| Ok(embed(op, &idx, register.len())?))
        .collect()
}

pub fn eval_dist_expr(r: &DistExpr, mu: &Povd) -> Result<DistValue> {
    let dim = mu.dim();
    match r {
        DistExpr::Expect(e) => {
            let mut acc = CMatrix::zeros(dim, dim);
            for (s, rho) in mu.iter() {
                let w = eval_state_expr(e, s)?;
                if w != 0 {
                    acc.add_assign_checked(&rho.matrix().scale(w as f64))?;
                }
            }
            Ok(DistValue::Op(acc))
        }
        DistExpr::MExpect {
            vars,
            meas,
            qubits,
            body,
        } => {
            if vars.len() != meas.meas.label_width() {
                return Err(Error::InvalidArgument(format!(
                    "{} variables bound by a measurement with {}-component labels",
                    vars.len(),
                    meas.meas.label_width()
                )));
            }
            let ops = embedded_ops(&meas.meas, qubits, mu.qubits())?;
            let mut acc = CMatrix::zeros(dim, dim);
            for (s, rho) in mu.iter() {
                for (op, label) in ops.iter().zip(meas.meas.labels()) {
                    let mut si = s.clone();
                    for (v, n) in vars.iter().zip(label) {
                        si.set(v, *n);
                    }
                    let w = eval_state_expr(body, &si)?;
                    if w != 0 {
                        acc.add_assign_checked(&conjugate_by(op, rho.matrix())?.scale(w as f64))?;
                    }
                }
            }
            Ok(DistValue::Op(acc))
        }
        DistExpr::Num(c) => Ok(DistValue::Scalar(*c)),
        DistExpr::Add(a, b) | DistExpr::Sub(a, b) => {
            let add = matches!(r, DistExpr::Add(..));
            match (eval_dist_expr(a, mu)?, eval_dist_expr(b, mu)?) {
                (DistValue::Scalar(x), DistValue::Scalar(y)) => {
                    Ok(DistValue::Scalar(if add { x + y } else { x - y }))
                }
                (DistValue::Op(x), DistValue::Op(y)) => {
                    Ok(DistValue::Op(if add { x.try_add(&y)? } else { x.try_sub(&y)? }))
                }
                (x, y) => Err(Error::KindMismatch(format!(
                    "cannot combine {} and {} in `{r}`",
                    x.kind(),
                    y.kind()
                ))),
            }
        }
        DistExpr::Scale(c, inner) => Ok(match eval_dist_expr(inner, mu)? {
            DistValue::Scalar(x) => DistValue::Scalar(c * x),
            DistValue::Op(m) => DistValue::Op(m.scale(*c)),
        }),
        DistExpr::Trace(inner) => match eval_dist_expr(inner, mu)? {
            DistValue::Op(m) => Ok(DistValue::Scalar(m.trace().re)),
            DistValue::Scalar(_) => Err(Error::KindMismatch(format!("trace of a scalar in `{r}`"))),
        },
    }
}

/// Compares two values: `≤` is the Löwner order on operators and `<` is
/// `≤` without equality.
pub fn compare(l: &DistValue, op: CmpOp, r: &DistValue) -> Result<bool> {
    match (l, r) {
        (DistValue::Scalar(x), DistValue::Scalar(y)) => {
            let eq = (x - y).abs() <= EPS_NUM;
            Ok(match op {
                CmpOp::Eq => eq,
                CmpOp::Le => *x <= y + EPS_NUM,
                CmpOp::Lt => *x <= y + EPS_NUM && !eq,
            })
        }
        (DistValue::Op(a), DistValue::Op(b)) => {
            if a.rows() != b.rows() {
                return Err(Error::KindMismatch(format!(
                    "operators of dimension {} and {}",
                    a.rows(),
                    b.rows()
                )));
            }
            let eq = a.approx_eq(b, EPS_NUM);
            Ok(match op {
                CmpOp::Eq => eq,
                CmpOp::Le => eq || crate::qmath::loewner_leq(a, b)?,
                CmpOp::Lt => !eq && crate::qmath::loewner_leq(a, b)?,
            })
        }
        _ => Err(Error::KindMismatch(format!(
            "cannot compare {} with {}",
            l.kind(),
            r.kind()
        ))),
    }
}

/// `μ ⊨ □ψ`: ψ holds on every classical state in the support.
pub fn box_holds(psi: &StateAssn, mu: &Povd) -> Result<bool> {
    for s in mu.support() {
        if !eval_state_assn(psi, s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Top-level `□ψ` conjuncts of `p`.
fn box_conjuncts<'a>(p: &'a DistAssn, out: &mut Vec<&'a StateAssn>) {
    match p {
        DistAssn::Box(psi) => out.push(psi),
        DistAssn::And(l, r) => {
            box_conjuncts(l, out);
            box_conjuncts(r, out);
        }
        _ => {}
    }
}

fn all_hold(psis: &[&StateAssn], s: &ClassicalState) -> Result<bool> {
    for p in psis {
        if !eval_state_assn(p, s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn split_by(mu: &Povd, psis: &[&StateAssn], positive: bool) -> Result<(Povd, Povd)> {
    let yes = mu.restrict_by(|s| Ok(all_hold(psis, s)? == positive))?;
    let no = mu.restrict_by(|s| Ok(all_hold(psis, s)? != positive))?;
    Ok((yes, no))
}

/// Three-valued satisfaction `μ ⊨ P`.
///
/// `⊕` is decided exactly when both operands carry top-level `□` conjuncts
/// that no support state satisfies together, since then the split is
/// forced. Otherwise the guard and the `□` conjuncts propose splits; one
/// that works proves the assertion, and failing all of them leaves it
/// indeterminate.
pub fn holds(p: &DistAssn, mu: &Povd) -> Result<Truth> {
    Ok(match p {
        DistAssn::Bool(b) => (*b).into(),
        DistAssn::Cmp(l, op, r) => compare(&eval_dist_expr(l, mu)?, *op, &eval_dist_expr(r, mu)?)?.into(),
        DistAssn::Not(q) => holds(q, mu)?.not(),
        DistAssn::And(l, r) => {
            let a = holds(l, mu)?;
            if a == Truth::False {
                return Ok(a);
            }
            a.and(holds(r, mu)?)
        }
        DistAssn::Or(l, r) => {
            let a = holds(l, mu)?;
            if a == Truth::True {
                return Ok(a);
            }
            a.or(holds(r, mu)?)
        }
        DistAssn::Implies(l, r) => {
            let a = holds(l, mu)?;
            if a == Truth::False {
                return Ok(Truth::True);
            }
            a.implies(holds(r, mu)?)
        }
        DistAssn::Quant { q, var, lo, hi, body } => {
            let mut acc = Truth::from(*q == Quant::Forall);
            for n in *lo..=*hi {
                let v = holds(&instantiate(body, var, n)?, mu)?;
                acc = match q {
                    Quant::Forall => acc.and(v),
                    Quant::Exists => acc.or(v),
                };
                if (*q == Quant::Forall && acc == Truth::False) || (*q == Quant::Exists && acc == Truth::True) {
                    break;
                }
            }
            acc
        }
        DistAssn::Box(psi) => box_holds(psi, mu)?.into(),
        DistAssn::CharEq(nu) => {
            if nu.qubits() != mu.qubits() {
                return Err(Error::RegisterMismatch {
                    left: nu.qubits().to_vec(),
                    right: mu.qubits().to_vec(),
                });
            }
            mu.approx_eq(nu, EPS_NUM).into()
        }
        DistAssn::OPlus { left, right, guard } => holds_oplus(left, right, guard.as_ref(), mu)?,
    })
}

fn holds_oplus(left: &DistAssn, right: &DistAssn, guard: Option<&StateAssn>, mu: &Povd) -> Result<Truth> {
    let empty = Povd::empty(mu.qubits().to_vec());
    if mu.is_empty() {
        return Ok(holds(left, &empty)?.and(holds(right, &empty)?));
    }
    let mut lb = Vec::new();
    let mut rb = Vec::new();
    box_conjuncts(left, &mut lb);
    box_conjuncts(right, &mut rb);

    if !lb.is_empty() && !rb.is_empty() {
        let mut disjoint = true;
        for s in mu.support() {
            let (a, b) = (all_hold(&lb, s)?, all_hold(&rb, s)?);
            if !a && !b {
                // Neither part may contain this state.
                return Ok(Truth::False);
            }
            disjoint &= !(a && b);
        }
        if disjoint {
            let (mu1, _) = split_by(mu, &lb, true)?;
            let (mu2, _) = split_by(mu, &rb, true)?;
            let a = holds(left, &mu1)?;
            if a == Truth::False {
                return Ok(a);
            }
            return Ok(a.and(holds(right, &mu2)?));
        }
    }

    let mut candidates: Vec<(Povd, Povd)> = Vec::new();
    if let Some(g) = guard {
        candidates.push(split_by(mu, &[g], true)?);
    }
    if !lb.is_empty() {
        candidates.push(split_by(mu, &lb, true)?);
    }
    if !rb.is_empty() {
        let (yes, no) = split_by(mu, &rb, true)?;
        candidates.push((no, yes));
    }
    candidates.push((mu.clone(), empty.clone()));
    candidates.push((empty, mu.clone()));
    for (m1, m2) in &candidates {
        if holds(left, m1)? == Truth::True && holds(right, m2)? == Truth::True {
            return Ok(Truth::True);
        }
    }
    Ok(Truth::Indeterminate)
}

/// Outcome of comparing `□ψ` with its expectation encodings on one μ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoxEquivalence {
    pub support: bool,
    pub expectation: bool,
    pub measured_expectation: bool,
}

impl BoxEquivalence {
    pub fn agrees(&self) -> bool {
        self.support == self.expectation && self.support == self.measured_expectation
    }
}

/// Checks `□ψ` three ways: on the support, as `E[1_ψ] = E[1_true]`, and as
/// the same equation under a computational measurement of the whole
/// register bound to fresh variables.
pub fn box_equiv_check(psi: &StateAssn, mu: &Povd) -> Result<BoxEquivalence> {
    let support = box_holds(psi, mu)?;
    let ind = StateExpr::ind(psi.clone());
    let one = StateExpr::ind(StateAssn::Bool(true));
    let expectation = compare(
        &eval_dist_expr(&DistExpr::Expect(ind.clone()), mu)?,
        CmpOp::Eq,
        &eval_dist_expr(&DistExpr::Expect(one.clone()), mu)?,
    )?;

    let n = mu.qubits().len();
    let mut fresh = super::subst::FreshVars::avoiding(&psi.fv());
    let vars = (0..n).map(|_| fresh.next_var()).collect::<Result<Vec<_>>>()?;
    let comp = GeneralMeasurement::computational(n);
    let labels = (0..comp.len())
        .map(|i| (0..n).map(|k| ((i >> (n - 1 - k)) & 1) as i64).collect())
        .collect();
    let per_qubit = GeneralMeasurement::with_labels(comp.ops().to_vec(), labels)?;
    let mexp = |body: StateExpr| DistExpr::MExpect {
        vars: vars.clone(),
        meas: super::ast::MeasSpec::anonymous(per_qubit.clone()),
        qubits: mu.qubits().to_vec(),
        body,
    };
    let measured_expectation = compare(
        &eval_dist_expr(&mexp(ind), mu)?,
        CmpOp::Eq,
        &eval_dist_expr(&mexp(one), mu)?,
    )?;
    Ok(BoxEquivalence {
        support,
        expectation,
        measured_expectation,
    })
}
