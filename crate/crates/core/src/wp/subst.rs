//! The syntactic substitutions behind the precondition calculus: `P[a/x]`
//! for assignment, `h` for qubit reset, `g^U` for unitaries and `f^M` for
//! measurement.

use crate::assertlang::subst::{subst_dist_assn, BoundPolicy, FreshVars};
use crate::assertlang::{DistAssn, DistExpr, MeasSpec, StateAssn, StateExpr};
use crate::lang::AExp;
use crate::qmath::{embed, CMatrix, GeneralMeasurement, Label, UnitaryGate};
use crate::state::quantum::qubit_indices;
use crate::{Error, Result};

/// `P[a/x]`. Fails if `x` is bound by a measurement expectation in `P`.
pub fn subst_assign(p: &DistAssn, a: &AExp, x: &str, fresh: &mut FreshVars) -> Result<DistAssn> {
    no_char_eq(p)?;
    subst_dist_assn(p, x, &StateExpr::from(a), BoundPolicy::Reject, fresh)
}

fn no_char_eq(p: &DistAssn) -> Result<()> {
    let mut found = false;
    visit(p, &mut |q| found |= matches!(q, DistAssn::CharEq(_)));
    if found {
        return Err(Error::Unsupported(
            "characteristic assertions `is(...)` cannot be transformed".into(),
        ));
    }
    Ok(())
}

fn visit(p: &DistAssn, f: &mut impl FnMut(&DistAssn)) {
    f(p);
    match p {
        DistAssn::OPlus { left, right, .. }
        | DistAssn::And(left, right)
        | DistAssn::Or(left, right)
        | DistAssn::Implies(left, right) => {
            visit(left, f);
            visit(right, f);
        }
        DistAssn::Not(q) | DistAssn::Quant { body: q, .. } => visit(q, f),
        _ => {}
    }
}

/// Rebuilds `p` with `leaf` applied to every distribution expression atom,
/// `boxed` to every `□ψ` and `guard` to every split guard.
struct Rewrite<'a> {
    leaf: &'a mut dyn FnMut(&DistExpr) -> Result<DistExpr>,
    boxed: &'a mut dyn FnMut(&StateAssn) -> Result<DistAssn>,
    guard: &'a dyn Fn(&StateAssn) -> Option<StateAssn>,
}

impl Rewrite<'_> {
    fn expr(&mut self, r: &DistExpr) -> Result<DistExpr> {
        Ok(match r {
            DistExpr::Expect(_) | DistExpr::MExpect { .. } => (self.leaf)(r)?,
            DistExpr::Num(c) => DistExpr::Num(*c),
            DistExpr::Add(a, b) => DistExpr::add(self.expr(a)?, self.expr(b)?),
            DistExpr::Sub(a, b) => DistExpr::sub(self.expr(a)?, self.expr(b)?),
            DistExpr::Scale(c, a) => DistExpr::scale(*c, self.expr(a)?),
            DistExpr::Trace(a) => DistExpr::trace(self.expr(a)?),
        })
    }

    fn assn(&mut self, p: &DistAssn) -> Result<DistAssn> {
        Ok(match p {
            DistAssn::Bool(b) => DistAssn::Bool(*b),
            DistAssn::CharEq(_) => unreachable!("rejected before rewriting"),
            DistAssn::Cmp(l, op, r) => DistAssn::Cmp(self.expr(l)?, *op, self.expr(r)?),
            DistAssn::OPlus { left, right, guard } => DistAssn::OPlus {
                left: Box::new(self.assn(left)?),
                right: Box::new(self.assn(right)?),
                guard: guard.as_ref().and_then(|g| (self.guard)(g)),
            },
            DistAssn::Not(q) => DistAssn::not(self.assn(q)?),
            DistAssn::And(l, r) => DistAssn::and(self.assn(l)?, self.assn(r)?),
            DistAssn::Or(l, r) => DistAssn::or(self.assn(l)?, self.assn(r)?),
            DistAssn::Implies(l, r) => DistAssn::implies(self.assn(l)?, self.assn(r)?),
            DistAssn::Quant { q, var, lo, hi, body } => DistAssn::Quant {
                q: *q,
                var: var.clone(),
                lo: *lo,
                hi: *hi,
                body: Box::new(self.assn(body)?),
            },
            DistAssn::Box(psi) => (self.boxed)(psi)?,
        })
    }
}

/// `qs` followed by the members of `extra` not already present.
fn union(qs: &[String], extra: &[String]) -> Vec<String> {
    let mut out = qs.to_vec();
    out.extend(extra.iter().filter(|q| !qs.contains(q)).cloned());
    out
}

/// Operators of `m` on `qs`, lifted to the qubit list `onto`.
fn lift(m: &GeneralMeasurement, qs: &[String], onto: &[String]) -> Result<Vec<CMatrix>> {
    let idx = qubit_indices(onto, qs)?;
    m.ops().iter().map(|op| Ok(embed(op, &idx, onto.len())?)).collect()
}

fn lift_op(op: &CMatrix, qs: &[String], onto: &[String]) -> Result<CMatrix> {
    Ok(embed(op, &qubit_indices(onto, qs)?, onto.len())?)
}

/// `E_{x̄∼M[q̄]}[e]` with every operator `M_i` replaced by the products
/// `M_i K_j` for the operators `K_j` on `kq`, labelled `l(i)`.
fn postcompose(
    vars: &[String],
    meas: &GeneralMeasurement,
    qubits: &[String],
    body: &StateExpr,
    ks: &[CMatrix],
    kq: &[String],
) -> Result<DistExpr> {
    let all = union(qubits, kq);
    let ms = lift(meas, qubits, &all)?;
    let ks: Vec<CMatrix> = ks.iter().map(|k| lift_op(k, kq, &all)).collect::<Result<_>>()?;
    let mut ops = Vec::new();
    let mut labels: Vec<Label> = Vec::new();
    for (m, label) in ms.iter().zip(meas.labels()) {
        for k in &ks {
            ops.push(m.matmul(k)?);
            labels.push(label.clone());
        }
    }
    Ok(DistExpr::MExpect {
        vars: vars.to_vec(),
        meas: MeasSpec::anonymous(GeneralMeasurement::with_labels(ops, labels)?),
        qubits: all,
        body: body.clone(),
    })
}

/// `E[e]` as an expectation over the operators `ks` on `kq`, bound to a
/// fresh variable through the identity labelling.
fn wrap(e: &StateExpr, ks: &[CMatrix], kq: &[String], fresh: &mut FreshVars) -> Result<DistExpr> {
    let m = GeneralMeasurement::new(ks.to_vec())?;
    Ok(DistExpr::MExpect {
        vars: vec![fresh.next_var()?],
        meas: MeasSpec::anonymous(m),
        qubits: kq.to_vec(),
        body: e.clone(),
    })
}

fn reset_ops() -> [CMatrix; 2] {
    [CMatrix::basis_op(2, 0, 0), CMatrix::basis_op(2, 0, 1)]
}

/// `h(P)`: the precondition of `P` for `q := |0⟩`.
pub fn subst_h(p: &DistAssn, q: &str, fresh: &mut FreshVars) -> Result<DistAssn> {
    no_char_eq(p)?;
    fresh.reserve(&all_vars(p));
    let kq = [q.to_string()];
    let ks = reset_ops();
    Rewrite {
        leaf: &mut |r| match r {
            DistExpr::Expect(e) => wrap(e, &ks, &kq, fresh),
            DistExpr::MExpect {
                vars,
                meas,
                qubits,
                body,
            } => postcompose(vars, &meas.meas, qubits, body, &ks, &kq),
            _ => unreachable!(),
        },
        boxed: &mut |psi| Ok(DistAssn::Box(psi.clone())),
        guard: &|g| Some(g.clone()),
    }
    .assn(p)
}

/// `g^U(P)`: the precondition of `P` for `U[q̄]`.
pub fn subst_g(p: &DistAssn, u: &UnitaryGate, qs: &[String], fresh: &mut FreshVars) -> Result<DistAssn> {
    if u.arity() != qs.len() {
        return Err(Error::InvalidArgument(format!(
            "gate acts on {} qubits, {} given",
            u.arity(),
            qs.len()
        )));
    }
    no_char_eq(p)?;
    fresh.reserve(&all_vars(p));
    let ks = [u.matrix().clone()];
    Rewrite {
        leaf: &mut |r| match r {
            DistExpr::Expect(e) => wrap(e, &ks, qs, fresh),
            DistExpr::MExpect {
                vars,
                meas,
                qubits,
                body,
            } => postcompose(vars, &meas.meas, qubits, body, &ks, qs),
            _ => unreachable!(),
        },
        boxed: &mut |psi| Ok(DistAssn::Box(psi.clone())),
        guard: &|g| Some(g.clone()),
    }
    .assn(p)
}

/// `f(P)`: the precondition of `P` for `x := M[q̄]`. `name` is kept on
/// expectations that use `M` unchanged.
pub fn subst_f(
    p: &DistAssn,
    x: &str,
    m: &GeneralMeasurement,
    name: Option<&str>,
    qs: &[String],
    fresh: &mut FreshVars,
) -> Result<DistAssn> {
    if m.arity() != qs.len() {
        return Err(Error::InvalidArgument(format!(
            "measurement acts on {} qubits, {} given",
            m.arity(),
            qs.len()
        )));
    }
    if m.label_width() != 1 {
        return Err(Error::InvalidArgument(
            "a measured variable needs single-component labels".into(),
        ));
    }
    no_char_eq(p)?;
    fresh.reserve(&all_vars(p));
    let p = &rename_quantified(p, x, fresh)?;
    let spec = MeasSpec {
        name: name.map(str::to_string),
        meas: std::sync::Arc::new(m.clone()),
    };
    let single = |e: &StateExpr| DistExpr::MExpect {
        vars: vec![x.to_string()],
        meas: spec.clone(),
        qubits: qs.to_vec(),
        body: e.clone(),
    };
    Rewrite {
        leaf: &mut |r| match r {
            DistExpr::Expect(e) => Ok(single(e)),
            DistExpr::MExpect {
                vars,
                meas,
                qubits,
                body,
            } => compose(x, m, qs, vars, &meas.meas, qubits, body),
            _ => unreachable!(),
        },
        boxed: &mut |psi| {
            if psi.fv().contains(x) {
                Ok(DistAssn::eq(
                    single(&StateExpr::ind(psi.clone())),
                    single(&StateExpr::ind(StateAssn::Bool(true))),
                ))
            } else {
                Ok(DistAssn::Box(psi.clone()))
            }
        },
        guard: &|g| if g.fv().contains(x) { None } else { Some(g.clone()) },
    }
    .assn(p)
}

/// `E_{ȳ∼N[q̄']}[e]` preceded by `x := M[q̄]`: operators `N_j M_i`.
fn compose(
    x: &str,
    m: &GeneralMeasurement,
    qs: &[String],
    ys: &[String],
    n: &GeneralMeasurement,
    nq: &[String],
    body: &StateExpr,
) -> Result<DistExpr> {
    let all = union(qs, nq);
    let ms = lift(m, qs, &all)?;
    let ns = lift(n, nq, &all)?;
    let rebinds = ys.iter().any(|y| y == x);
    let mut ops = Vec::new();
    let mut labels: Vec<Label> = Vec::new();
    for (mi, ki) in ms.iter().zip(m.labels()) {
        for (nj, lj) in ns.iter().zip(n.labels()) {
            ops.push(nj.matmul(mi)?);
            labels.push(if rebinds {
                lj.clone()
            } else {
                ki.iter().chain(lj).copied().collect()
            });
        }
    }
    let vars = if rebinds {
        ys.to_vec()
    } else {
        std::iter::once(x.to_string()).chain(ys.iter().cloned()).collect()
    };
    Ok(DistExpr::MExpect {
        vars,
        meas: MeasSpec::anonymous(GeneralMeasurement::with_labels(ops, labels)?),
        qubits: all,
        body: body.clone(),
    })
}

fn all_vars(p: &DistAssn) -> Vec<String> {
    let mut s = std::collections::BTreeSet::new();
    p.all_vars(&mut s);
    s.into_iter().collect()
}

/// Renames distribution-level quantifiers binding `x`, so that `f` does not
/// mistake them for the measured variable.
fn rename_quantified(p: &DistAssn, x: &str, fresh: &mut FreshVars) -> Result<DistAssn> {
    let go = |q: &DistAssn, fresh: &mut FreshVars| rename_quantified(q, x, fresh);
    Ok(match p {
        DistAssn::Quant { q, var, lo, hi, body } if var == x => {
            let v = fresh.next_var()?;
            let renamed = subst_dist_assn(body, x, &StateExpr::Var(v.clone()), BoundPolicy::Shadow, fresh)?;
            DistAssn::Quant {
                q: *q,
                var: v,
                lo: *lo,
                hi: *hi,
                body: Box::new(go(&renamed, fresh)?),
            }
        }
        DistAssn::Quant { q, var, lo, hi, body } => DistAssn::Quant {
            q: *q,
            var: var.clone(),
            lo: *lo,
            hi: *hi,
            body: Box::new(go(body, fresh)?),
        },
        DistAssn::OPlus { left, right, guard } => DistAssn::OPlus {
            left: Box::new(go(left, fresh)?),
            right: Box::new(go(right, fresh)?),
            guard: guard.clone(),
        },
        DistAssn::Not(q) => DistAssn::not(go(q, fresh)?),
        DistAssn::And(l, r) => DistAssn::and(go(l, fresh)?, go(r, fresh)?),
        DistAssn::Or(l, r) => DistAssn::or(go(l, fresh)?, go(r, fresh)?),
        DistAssn::Implies(l, r) => DistAssn::implies(go(l, fresh)?, go(r, fresh)?),
        _ => p.clone(),
    })
}
