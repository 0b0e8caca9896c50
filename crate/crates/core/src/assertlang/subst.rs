//! Substitution of a state expression for a classical variable, and the
//! reserved namespace of fresh variables.

use std::collections::BTreeSet;

use super::ast::{DistAssn, DistExpr, StateAssn, StateExpr};
use crate::{Error, Result};

/// Fresh variables are `$f0`, `$f1`, ...; the `$` keeps them out of programs.
pub const FRESH_PREFIX: &str = "$f";

/// Hands out fresh names above every index already in use.
#[derive(Debug, Clone, Default)]
pub struct FreshVars {
    next: u64,
}

impl FreshVars {
    pub fn new() -> Self {
        FreshVars::default()
    }

    pub fn avoiding<'a>(names: impl IntoIterator<Item = &'a String>) -> Self {
        let mut f = FreshVars::new();
        f.reserve(names);
        f
    }

    pub fn for_assn(p: &DistAssn) -> Self {
        let mut names = BTreeSet::new();
        p.all_vars(&mut names);
        FreshVars::avoiding(&names)
    }

    /// Moves the counter past any `$fK` among `names`.
    pub fn reserve<'a>(&mut self, names: impl IntoIterator<Item = &'a String>) {
        for n in names {
            if let Some(k) = n.strip_prefix(FRESH_PREFIX).and_then(|d| d.parse::<u64>().ok()) {
                self.next = self.next.max(k + 1);
            }
        }
    }

    pub fn next_var(&mut self) -> Result<String> {
        let k = self.next;
        self.next = k
            .checked_add(1)
            .ok_or_else(|| Error::Unsupported("fresh variable pool exhausted".into()))?;
        Ok(format!("{FRESH_PREFIX}{k}"))
    }
}

pub fn is_fresh_name(x: &str) -> bool {
    x.starts_with('$')
}

/// What to do when the variable is bound by an `E_{x̄∼M}` inside the
/// assertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundPolicy {
    /// The binder shadows the variable; the body is left alone.
    Shadow,
    /// Fail with [`Error::Capture`].
    Reject,
}

struct Subst<'a> {
    x: &'a str,
    a: &'a StateExpr,
    fv_a: BTreeSet<String>,
    policy: BoundPolicy,
    fresh: &'a mut FreshVars,
}

/// `r[a/x]` for distribution assertions.
pub fn subst_dist_assn(
    p: &DistAssn,
    x: &str,
    a: &StateExpr,
    policy: BoundPolicy,
    fresh: &mut FreshVars,
) -> Result<DistAssn> {
    let mut fv_a = BTreeSet::new();
    a.free_vars(&mut fv_a);
    Subst {
        x,
        a,
        fv_a,
        policy,
        fresh,
    }
    .assn(p)
}

pub fn subst_dist_expr(
    r: &DistExpr,
    x: &str,
    a: &StateExpr,
    policy: BoundPolicy,
    fresh: &mut FreshVars,
) -> Result<DistExpr> {
    let mut fv_a = BTreeSet::new();
    a.free_vars(&mut fv_a);
    Subst {
        x,
        a,
        fv_a,
        policy,
        fresh,
    }
    .dexpr(r)
}

pub fn subst_state_assn(psi: &StateAssn, x: &str, a: &StateExpr, fresh: &mut FreshVars) -> Result<StateAssn> {
    let mut fv_a = BTreeSet::new();
    a.free_vars(&mut fv_a);
    Subst {
        x,
        a,
        fv_a,
        policy: BoundPolicy::Shadow,
        fresh,
    }
    .sassn(psi)
}

pub fn subst_state_expr(e: &StateExpr, x: &str, a: &StateExpr, fresh: &mut FreshVars) -> Result<StateExpr> {
    let mut fv_a = BTreeSet::new();
    a.free_vars(&mut fv_a);
    Subst {
        x,
        a,
        fv_a,
        policy: BoundPolicy::Shadow,
        fresh,
    }
    .sexpr(e)
}

/// `P` with the integer `n` for free occurrences of `z`.
pub fn instantiate(p: &DistAssn, z: &str, n: i64) -> Result<DistAssn> {
    subst_dist_assn(p, z, &StateExpr::Int(n), BoundPolicy::Shadow, &mut FreshVars::new())
}

pub fn instantiate_state(psi: &StateAssn, z: &str, n: i64) -> Result<StateAssn> {
    subst_state_assn(psi, z, &StateExpr::Int(n), &mut FreshVars::new())
}

impl Subst<'_> {
    fn rename_var(&mut self, v: &str) -> Result<Option<String>> {
        if self.fv_a.contains(v) {
            let mut used: Vec<String> = self.fv_a.iter().cloned().collect();
            used.push(self.x.to_string());
            self.fresh.reserve(&used);
            Ok(Some(self.fresh.next_var()?))
        } else {
            Ok(None)
        }
    }

    fn sexpr(&mut self, e: &StateExpr) -> Result<StateExpr> {
        Ok(match e {
            StateExpr::Int(n) => StateExpr::Int(*n),
            StateExpr::Var(y) if y == self.x => self.a.clone(),
            StateExpr::Var(y) => StateExpr::Var(y.clone()),
            StateExpr::Ind(p) => StateExpr::ind(self.sassn(p)?),
            StateExpr::Add(l, r) => StateExpr::add(self.sexpr(l)?, self.sexpr(r)?),
            StateExpr::Sub(l, r) => StateExpr::sub(self.sexpr(l)?, self.sexpr(r)?),
            StateExpr::Mul(l, r) => StateExpr::mul(self.sexpr(l)?, self.sexpr(r)?),
        })
    }

    fn sassn(&mut self, p: &StateAssn) -> Result<StateAssn> {
        Ok(match p {
            StateAssn::Bool(b) => StateAssn::Bool(*b),
            StateAssn::Cmp(l, op, r) => StateAssn::Cmp(self.sexpr(l)?, *op, self.sexpr(r)?),
            StateAssn::Not(q) => StateAssn::not(self.sassn(q)?),
            StateAssn::And(l, r) => StateAssn::and(self.sassn(l)?, self.sassn(r)?),
            StateAssn::Or(l, r) => StateAssn::or(self.sassn(l)?, self.sassn(r)?),
            StateAssn::Implies(l, r) => StateAssn::implies(self.sassn(l)?, self.sassn(r)?),
            StateAssn::Quant { q, var, lo, hi, body } => {
                if var == self.x {
                    return Ok(p.clone());
                }
                let (var, body) = match self.rename_var(var)? {
                    Some(v2) => {
                        let renamed = subst_state_assn(body, var, &StateExpr::Var(v2.clone()), self.fresh)?;
                        (v2, renamed)
                    }
                    None => (var.clone(), (**body).clone()),
                };
                StateAssn::Quant {
                    q: *q,
                    var,
                    lo: *lo,
                    hi: *hi,
                    body: Box::new(self.sassn(&body)?),
                }
            }
        })
    }

    fn dexpr(&mut self, r: &DistExpr) -> Result<DistExpr> {
        Ok(match r {
            DistExpr::Expect(e) => DistExpr::Expect(self.sexpr(e)?),
            DistExpr::MExpect {
                vars,
                meas,
                qubits,
                body,
            } => {
                if vars.iter().any(|v| v == self.x) {
                    return match self.policy {
                        BoundPolicy::Shadow => Ok(r.clone()),
                        BoundPolicy::Reject => Err(Error::Capture(self.x.to_string())),
                    };
                }
                let mut vars = vars.clone();
                let mut body = body.clone();
                for v in vars.iter_mut() {
                    if let Some(v2) = self.rename_var(v)? {
                        body = subst_state_expr(&body, v, &StateExpr::Var(v2.clone()), self.fresh)?;
                        *v = v2;
                    }
                }
                DistExpr::MExpect {
                    vars,
                    meas: meas.clone(),
                    qubits: qubits.clone(),
                    body: self.sexpr(&body)?,
                }
            }
            DistExpr::Num(c) => DistExpr::Num(*c),
            DistExpr::Add(l, r) => DistExpr::add(self.dexpr(l)?, self.dexpr(r)?),
            DistExpr::Sub(l, r) => DistExpr::sub(self.dexpr(l)?, self.dexpr(r)?),
            DistExpr::Scale(c, r) => DistExpr::scale(*c, self.dexpr(r)?),
            DistExpr::Trace(r) => DistExpr::trace(self.dexpr(r)?),
        })
    }

    fn assn(&mut self, p: &DistAssn) -> Result<DistAssn> {
        Ok(match p {
            DistAssn::Bool(b) => DistAssn::Bool(*b),
            DistAssn::CharEq(mu) => DistAssn::CharEq(mu.clone()),
            DistAssn::Cmp(l, op, r) => DistAssn::Cmp(self.dexpr(l)?, *op, self.dexpr(r)?),
            DistAssn::OPlus { left, right, guard } => DistAssn::OPlus {
                left: Box::new(self.assn(left)?),
                right: Box::new(self.assn(right)?),
                guard: guard.as_ref().map(|g| self.sassn(g)).transpose()?,
            },
            DistAssn::Not(q) => DistAssn::not(self.assn(q)?),
            DistAssn::And(l, r) => DistAssn::and(self.assn(l)?, self.assn(r)?),
            DistAssn::Or(l, r) => DistAssn::or(self.assn(l)?, self.assn(r)?),
            DistAssn::Implies(l, r) => DistAssn::implies(self.assn(l)?, self.assn(r)?),
            DistAssn::Quant { q, var, lo, hi, body } => {
                if var == self.x {
                    return Ok(p.clone());
                }
                let (var, body) = match self.rename_var(var)? {
                    Some(v2) => {
                        let renamed = subst_dist_assn(
                            body,
                            var,
                            &StateExpr::Var(v2.clone()),
                            BoundPolicy::Shadow,
                            self.fresh,
                        )?;
                        (v2, renamed)
                    }
                    None => (var.clone(), (**body).clone()),
                };
                DistAssn::Quant {
                    q: *q,
                    var,
                    lo: *lo,
                    hi: *hi,
                    body: Box::new(self.assn(&body)?),
                }
            }
            DistAssn::Box(psi) => DistAssn::Box(self.sassn(psi)?),
        })
    }
}
