use std::collections::BTreeSet;
use std::sync::Arc;

use crate::lang::{AExp, BExp};
use crate::qmath::GeneralMeasurement;
use crate::state::Povd;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Lt,
    Le,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quant {
    Forall,
    Exists,
}

/// Integer-valued expression over a classical state.
#[derive(Debug, Clone, PartialEq)]
pub enum StateExpr {
    Int(i64),
    Var(String),
    /// `1_ψ`
    Ind(Box<StateAssn>),
    Add(Box<StateExpr>, Box<StateExpr>),
    Sub(Box<StateExpr>, Box<StateExpr>),
    Mul(Box<StateExpr>, Box<StateExpr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateAssn {
    Bool(bool),
    Cmp(StateExpr, CmpOp, StateExpr),
    Not(Box<StateAssn>),
    And(Box<StateAssn>, Box<StateAssn>),
    Or(Box<StateAssn>, Box<StateAssn>),
    Implies(Box<StateAssn>, Box<StateAssn>),
    /// Quantifier over the integers `lo..=hi`.
    Quant {
        q: Quant,
        var: String,
        lo: i64,
        hi: i64,
        body: Box<StateAssn>,
    },
}

/// A measurement inside an assertion; `name` is kept only while the
/// operators are the ones the name refers to.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasSpec {
    pub name: Option<String>,
    pub meas: Arc<GeneralMeasurement>,
}

impl MeasSpec {
    pub fn named(name: &str, meas: Arc<GeneralMeasurement>) -> Self {
        MeasSpec {
            name: Some(name.to_string()),
            meas,
        }
    }

    pub fn anonymous(meas: GeneralMeasurement) -> Self {
        MeasSpec {
            name: None,
            meas: Arc::new(meas),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistExpr {
    /// `E[e]`
    Expect(StateExpr),
    /// `E_{x̄∼M[q̄]}[e]`
    MExpect {
        vars: Vec<String>,
        meas: MeasSpec,
        qubits: Vec<String>,
        body: StateExpr,
    },
    Num(f64),
    Add(Box<DistExpr>, Box<DistExpr>),
    Sub(Box<DistExpr>, Box<DistExpr>),
    Scale(f64, Box<DistExpr>),
    Trace(Box<DistExpr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistAssn {
    Bool(bool),
    Cmp(DistExpr, CmpOp, DistExpr),
    /// `P1 ⊕ P2`, optionally with the state assertion that decides the split.
    OPlus {
        left: Box<DistAssn>,
        right: Box<DistAssn>,
        guard: Option<StateAssn>,
    },
    Not(Box<DistAssn>),
    And(Box<DistAssn>, Box<DistAssn>),
    Or(Box<DistAssn>, Box<DistAssn>),
    Implies(Box<DistAssn>, Box<DistAssn>),
    Quant {
        q: Quant,
        var: String,
        lo: i64,
        hi: i64,
        body: Box<DistAssn>,
    },
    /// `□ψ`
    Box(StateAssn),
    /// `1_μ`: satisfied by exactly this distribution.
    CharEq(Box<Povd>),
}

impl StateExpr {
    pub fn var(x: &str) -> Self {
        StateExpr::Var(x.to_string())
    }

    pub fn ind(psi: StateAssn) -> Self {
        StateExpr::Ind(Box::new(psi))
    }

    pub fn add(a: StateExpr, b: StateExpr) -> Self {
        StateExpr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: StateExpr, b: StateExpr) -> Self {
        StateExpr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: StateExpr, b: StateExpr) -> Self {
        StateExpr::Mul(Box::new(a), Box::new(b))
    }

    pub fn free_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            StateExpr::Int(_) => {}
            StateExpr::Var(x) => {
                out.insert(x.clone());
            }
            StateExpr::Ind(p) => p.free_vars(out),
            StateExpr::Add(a, b) | StateExpr::Sub(a, b) | StateExpr::Mul(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            StateExpr::Ind(p) => p.all_vars(out),
            StateExpr::Add(a, b) | StateExpr::Sub(a, b) | StateExpr::Mul(a, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            _ => self.free_vars(out),
        }
    }
}

impl From<&AExp> for StateExpr {
    fn from(a: &AExp) -> Self {
        match a {
            AExp::Int(n) => StateExpr::Int(*n),
            AExp::Var(x) => StateExpr::Var(x.clone()),
            AExp::Add(l, r) => StateExpr::add((&**l).into(), (&**r).into()),
            AExp::Sub(l, r) => StateExpr::sub((&**l).into(), (&**r).into()),
            AExp::Mul(l, r) => StateExpr::mul((&**l).into(), (&**r).into()),
        }
    }
}

impl StateAssn {
    pub fn cmp(a: StateExpr, op: CmpOp, b: StateExpr) -> Self {
        StateAssn::Cmp(a, op, b)
    }

    pub fn eq(a: StateExpr, b: StateExpr) -> Self {
        StateAssn::Cmp(a, CmpOp::Eq, b)
    }

    pub fn not(p: StateAssn) -> Self {
        StateAssn::Not(Box::new(p))
    }

    pub fn and(a: StateAssn, b: StateAssn) -> Self {
        StateAssn::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: StateAssn, b: StateAssn) -> Self {
        StateAssn::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: StateAssn, b: StateAssn) -> Self {
        StateAssn::Implies(Box::new(a), Box::new(b))
    }

    pub fn free_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            StateAssn::Bool(_) => {}
            StateAssn::Cmp(a, _, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            StateAssn::Not(p) => p.free_vars(out),
            StateAssn::And(a, b) | StateAssn::Or(a, b) | StateAssn::Implies(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            StateAssn::Quant { var, body, .. } => {
                let mut inner = BTreeSet::new();
                body.free_vars(&mut inner);
                inner.remove(var);
                out.extend(inner);
            }
        }
    }

    pub fn fv(&self) -> BTreeSet<String> {
        let mut s = BTreeSet::new();
        self.free_vars(&mut s);
        s
    }

    pub fn all_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            StateAssn::Bool(_) => {}
            StateAssn::Cmp(a, _, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            StateAssn::Not(p) => p.all_vars(out),
            StateAssn::And(a, b) | StateAssn::Or(a, b) | StateAssn::Implies(a, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            StateAssn::Quant { var, body, .. } => {
                out.insert(var.clone());
                body.all_vars(out);
            }
        }
    }
}

impl From<&BExp> for StateAssn {
    fn from(b: &BExp) -> Self {
        match b {
            BExp::True => StateAssn::Bool(true),
            BExp::False => StateAssn::Bool(false),
            BExp::Eq(l, r) => StateAssn::Cmp(l.into(), CmpOp::Eq, r.into()),
            BExp::Leq(l, r) => StateAssn::Cmp(l.into(), CmpOp::Le, r.into()),
            BExp::Not(p) => StateAssn::not((&**p).into()),
            BExp::And(l, r) => StateAssn::and((&**l).into(), (&**r).into()),
            BExp::Or(l, r) => StateAssn::or((&**l).into(), (&**r).into()),
        }
    }
}

impl DistExpr {
    pub fn expect(e: StateExpr) -> Self {
        DistExpr::Expect(e)
    }

    /// `E[1_ψ]`
    pub fn prob(psi: StateAssn) -> Self {
        DistExpr::Expect(StateExpr::ind(psi))
    }

    pub fn add(a: DistExpr, b: DistExpr) -> Self {
        DistExpr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: DistExpr, b: DistExpr) -> Self {
        DistExpr::Sub(Box::new(a), Box::new(b))
    }

    pub fn scale(c: f64, r: DistExpr) -> Self {
        DistExpr::Scale(c, Box::new(r))
    }

    pub fn trace(r: DistExpr) -> Self {
        DistExpr::Trace(Box::new(r))
    }

    pub fn free_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            DistExpr::Expect(e) => e.free_vars(out),
            DistExpr::MExpect { vars, body, .. } => {
                let mut inner = BTreeSet::new();
                body.free_vars(&mut inner);
                for v in vars {
                    inner.remove(v);
                }
                out.extend(inner);
            }
            DistExpr::Num(_) => {}
            DistExpr::Add(a, b) | DistExpr::Sub(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            DistExpr::Scale(_, r) | DistExpr::Trace(r) => r.free_vars(out),
        }
    }

    pub fn all_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            DistExpr::Expect(e) => e.all_vars(out),
            DistExpr::MExpect { vars, body, .. } => {
                out.extend(vars.iter().cloned());
                body.all_vars(out);
            }
            DistExpr::Num(_) => {}
            DistExpr::Add(a, b) | DistExpr::Sub(a, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            DistExpr::Scale(_, r) | DistExpr::Trace(r) => r.all_vars(out),
        }
    }
}

impl DistAssn {
    pub fn cmp(a: DistExpr, op: CmpOp, b: DistExpr) -> Self {
        DistAssn::Cmp(a, op, b)
    }

    pub fn eq(a: DistExpr, b: DistExpr) -> Self {
        DistAssn::Cmp(a, CmpOp::Eq, b)
    }

    pub fn oplus(l: DistAssn, r: DistAssn, guard: Option<StateAssn>) -> Self {
        DistAssn::OPlus {
            left: Box::new(l),
            right: Box::new(r),
            guard,
        }
    }

    pub fn not(p: DistAssn) -> Self {
        DistAssn::Not(Box::new(p))
    }

    pub fn and(a: DistAssn, b: DistAssn) -> Self {
        DistAssn::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: DistAssn, b: DistAssn) -> Self {
        DistAssn::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: DistAssn, b: DistAssn) -> Self {
        DistAssn::Implies(Box::new(a), Box::new(b))
    }

    pub fn boxed(psi: StateAssn) -> Self {
        DistAssn::Box(psi)
    }

    pub fn free_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            DistAssn::Bool(_) | DistAssn::CharEq(_) => {}
            DistAssn::Cmp(a, _, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            DistAssn::OPlus { left, right, guard } => {
                left.free_vars(out);
                right.free_vars(out);
                if let Some(g) = guard {
                    g.free_vars(out);
                }
            }
            DistAssn::Not(p) => p.free_vars(out),
            DistAssn::And(a, b) | DistAssn::Or(a, b) | DistAssn::Implies(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            DistAssn::Quant { var, body, .. } => {
                let mut inner = BTreeSet::new();
                body.free_vars(&mut inner);
                inner.remove(var);
                out.extend(inner);
            }
            DistAssn::Box(psi) => psi.free_vars(out),
        }
    }

    pub fn fv(&self) -> BTreeSet<String> {
        let mut s = BTreeSet::new();
        self.free_vars(&mut s);
        s
    }

    pub fn all_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            DistAssn::Bool(_) => {}
            DistAssn::CharEq(mu) => {
                for s in mu.support() {
                    out.extend(s.iter().map(|(k, _)| k.to_string()));
                }
            }
            DistAssn::Cmp(a, _, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            DistAssn::OPlus { left, right, guard } => {
                left.all_vars(out);
                right.all_vars(out);
                if let Some(g) = guard {
                    g.all_vars(out);
                }
            }
            DistAssn::Not(p) => p.all_vars(out),
            DistAssn::And(a, b) | DistAssn::Or(a, b) | DistAssn::Implies(a, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            DistAssn::Quant { var, body, .. } => {
                out.insert(var.clone());
                body.all_vars(out);
            }
            DistAssn::Box(psi) => psi.all_vars(out),
        }
    }

    /// Visits every distribution expression, outermost first.
    pub fn for_each_expr<'a>(&'a self, f: &mut impl FnMut(&'a DistExpr)) {
        fn go_expr<'a>(r: &'a DistExpr, f: &mut impl FnMut(&'a DistExpr)) {
            f(r);
            match r {
                DistExpr::Add(a, b) | DistExpr::Sub(a, b) => {
                    go_expr(a, f);
                    go_expr(b, f);
                }
                DistExpr::Scale(_, r) | DistExpr::Trace(r) => go_expr(r, f),
                _ => {}
            }
        }
        match self {
            DistAssn::Cmp(a, _, b) => {
                go_expr(a, f);
                go_expr(b, f);
            }
            DistAssn::OPlus { left, right, .. }
            | DistAssn::And(left, right)
            | DistAssn::Or(left, right)
            | DistAssn::Implies(left, right) => {
                left.for_each_expr(f);
                right.for_each_expr(f);
            }
            DistAssn::Not(p) => p.for_each_expr(f),
            DistAssn::Quant { body, .. } => body.for_each_expr(f),
            _ => {}
        }
    }
}
