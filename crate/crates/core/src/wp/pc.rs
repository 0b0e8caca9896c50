//! The precondition calculus for loop-free commands.

use crate::assertlang::subst::FreshVars;
use crate::assertlang::{DistAssn, DistExpr, MeasSpec, StateAssn};
use crate::lang::pretty::pretty_com_inline;
use crate::lang::{BExp, Com};
use crate::qmath::GeneralMeasurement;
use crate::{Error, Result, EPS_NUM};

use super::subst::{subst_assign, subst_f, subst_g, subst_h};

/// `pc(c, P)`, with fresh variables numbered above those in `P`.
pub fn pc(c: &Com, p: &DistAssn) -> Result<DistAssn> {
    pc_with(c, p, &mut FreshVars::for_assn(p))
}

pub fn pc_with(c: &Com, p: &DistAssn, fresh: &mut FreshVars) -> Result<DistAssn> {
    match c {
        Com::Skip | Com::Nil => Ok(p.clone()),
        Com::Abort => {
            if *p == DistAssn::Box(StateAssn::Bool(false)) {
                Ok(DistAssn::Bool(true))
            } else {
                Err(Error::AbortPost)
            }
        }
        Com::Assign(x, a) => subst_assign(p, a, x, fresh),
        Com::Seq(c0, c1) => {
            let mid = pc_with(c1, p, fresh)?;
            pc_with(c0, &mid, fresh)
        }
        Com::If(b, c0, c1) => {
            let yes = pc_with(c0, p, fresh)?;
            let no = pc_with(c1, p, fresh)?;
            let guard = StateAssn::from(b);
            Ok(DistAssn::oplus(
                DistAssn::and(yes, DistAssn::Box(guard.clone())),
                DistAssn::and(no, DistAssn::Box(StateAssn::from(&BExp::not(b.clone())))),
                Some(guard),
            ))
        }
        Com::While(..) => Err(Error::LoopInPc(pretty_com_inline(c))),
        Com::QInit(q) => subst_h(p, q, fresh),
        Com::QUnit(g, qs) => subst_g(p, &g.gate, qs, fresh),
        Com::QMeas(x, m, qs) => subst_f(p, x, &m.meas, Some(&m.name), qs, fresh),
    }
}

/// Drops operators whose entries are all below tolerance.
pub fn simplify_measurement(m: &GeneralMeasurement) -> Result<GeneralMeasurement> {
    let (ops, labels): (Vec<_>, Vec<_>) = m
        .iter()
        .filter(|(op, _)| op.max_norm() >= EPS_NUM)
        .map(|(op, l)| (op.clone(), l.clone()))
        .unzip();
    let out = GeneralMeasurement::with_labels(ops, labels)?;
    if crate::qmath::check_measurement(m) && !crate::qmath::check_measurement(&out) {
        return Err(Error::Unsupported("simplification broke completeness".into()));
    }
    Ok(out)
}

/// Simplifies every anonymous measurement in `p`.
pub fn simplify_assertion(p: &DistAssn) -> Result<DistAssn> {
    map_exprs(p, &mut |r| match r {
        DistExpr::MExpect {
            vars,
            meas,
            qubits,
            body,
        } if meas.name.is_none() => Ok(DistExpr::MExpect {
            vars: vars.clone(),
            meas: MeasSpec::anonymous(simplify_measurement(&meas.meas)?),
            qubits: qubits.clone(),
            body: body.clone(),
        }),
        _ => Ok(r.clone()),
    })
}

fn map_expr(r: &DistExpr, f: &mut impl FnMut(&DistExpr) -> Result<DistExpr>) -> Result<DistExpr> {
    Ok(match r {
        DistExpr::Add(a, b) => DistExpr::add(map_expr(a, f)?, map_expr(b, f)?),
        DistExpr::Sub(a, b) => DistExpr::sub(map_expr(a, f)?, map_expr(b, f)?),
        DistExpr::Scale(c, a) => DistExpr::scale(*c, map_expr(a, f)?),
        DistExpr::Trace(a) => DistExpr::trace(map_expr(a, f)?),
        _ => f(r)?,
    })
}

fn map_exprs(p: &DistAssn, f: &mut impl FnMut(&DistExpr) -> Result<DistExpr>) -> Result<DistAssn> {
    Ok(match p {
        DistAssn::Cmp(l, op, r) => DistAssn::Cmp(map_expr(l, f)?, *op, map_expr(r, f)?),
        DistAssn::OPlus { left, right, guard } => DistAssn::OPlus {
            left: Box::new(map_exprs(left, f)?),
            right: Box::new(map_exprs(right, f)?),
            guard: guard.clone(),
        },
        DistAssn::Not(q) => DistAssn::not(map_exprs(q, f)?),
        DistAssn::And(l, r) => DistAssn::and(map_exprs(l, f)?, map_exprs(r, f)?),
        DistAssn::Or(l, r) => DistAssn::or(map_exprs(l, f)?, map_exprs(r, f)?),
        DistAssn::Implies(l, r) => DistAssn::implies(map_exprs(l, f)?, map_exprs(r, f)?),
        DistAssn::Quant { q, var, lo, hi, body } => DistAssn::Quant {
            q: *q,
            var: var.clone(),
            lo: *lo,
            hi: *hi,
            body: Box::new(map_exprs(body, f)?),
        },
        _ => p.clone(),
    })
}

/// Distinct measurements of `p` in order of first appearance.
pub fn measurements_of(p: &DistAssn) -> Vec<&GeneralMeasurement> {
    let mut out: Vec<&GeneralMeasurement> = Vec::new();
    p.for_each_expr(&mut |r| {
        if let DistExpr::MExpect { meas, .. } = r {
            if !out.iter().any(|m| **m == *meas.meas) {
                out.push(&meas.meas);
            }
        }
    });
    out
}
