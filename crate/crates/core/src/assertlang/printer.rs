//! Concrete syntax for assertions. Output parses back to the same tree.

use std::fmt;

use super::ast::{CmpOp, DistAssn, DistExpr, MeasSpec, Quant, StateAssn, StateExpr};
use crate::qmath::literal::format_compact;
use crate::qmath::GeneralMeasurement;

fn cmp_str(op: CmpOp) -> &'static str {
    match op {
        CmpOp::Eq => "=",
        CmpOp::Lt => "<",
        CmpOp::Le => "<=",
    }
}

fn quant_str(q: Quant) -> &'static str {
    match q {
        Quant::Forall => "forall",
        Quant::Exists => "exists",
    }
}

pub fn pretty_state_expr(e: &StateExpr) -> String {
    let mut s = String::new();
    write_sexpr(e, 0, &mut s);
    s
}

// Levels: 1 for + and -, 2 for *, 3 for atoms.
fn write_sexpr(e: &StateExpr, min: u8, out: &mut String) {
    let (level, op, l, r) = match e {
        StateExpr::Int(n) => {
            out.push_str(&n.to_string());
            return;
        }
        StateExpr::Var(x) => {
            out.push_str(x);
            return;
        }
        StateExpr::Ind(p) => {
            out.push_str("1_{");
            write_sassn(p, 0, out);
            out.push('}');
            return;
        }
        StateExpr::Add(l, r) => (1, "+", l, r),
        StateExpr::Sub(l, r) => (1, "-", l, r),
        StateExpr::Mul(l, r) => (2, "*", l, r),
    };
    let paren = level < min;
    if paren {
        out.push('(');
    }
    write_sexpr(l, level, out);
    out.push_str(&format!(" {op} "));
    write_sexpr(r, level + 1, out);
    if paren {
        out.push(')');
    }
}

pub fn pretty_state_assn(p: &StateAssn) -> String {
    let mut s = String::new();
    write_sassn(p, 0, &mut s);
    s
}

fn open(paren: bool, out: &mut String) {
    if paren {
        out.push('(');
    }
}

fn close(paren: bool, out: &mut String) {
    if paren {
        out.push(')');
    }
}

// Levels: 1 for =>, 2 for ||, 3 for &&, 4 for !, 5 for atoms.
fn write_sassn(p: &StateAssn, min: u8, out: &mut String) {
    match p {
        StateAssn::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        StateAssn::Cmp(l, op, r) => {
            let paren = min >= 5;
            open(paren, out);
            write_sexpr(l, 0, out);
            out.push_str(&format!(" {} ", cmp_str(*op)));
            write_sexpr(r, 0, out);
            close(paren, out);
        }
        StateAssn::Not(q) => {
            out.push('!');
            write_sassn(q, 5, out);
        }
        StateAssn::And(l, r) | StateAssn::Or(l, r) => {
            let (level, op) = if matches!(p, StateAssn::And(..)) { (3, "&&") } else { (2, "||") };
            let paren = level < min;
            open(paren, out);
            write_sassn(l, level, out);
            out.push_str(&format!(" {op} "));
            write_sassn(r, level + 1, out);
            close(paren, out);
        }
        StateAssn::Implies(l, r) => {
            let paren = 1 < min;
            open(paren, out);
            write_sassn(l, 2, out);
            out.push_str(" => ");
            write_sassn(r, 1, out);
            close(paren, out);
        }
        StateAssn::Quant { q, var, lo, hi, body } => {
            let paren = min > 0;
            open(paren, out);
            out.push_str(&format!("{} {var} in {lo}..{hi}. ", quant_str(*q)));
            write_sassn(body, 0, out);
            close(paren, out);
        }
    }
}

/// `{[l1]: m1, [l2]: m2, ...}`
pub fn pretty_measurement_literal(m: &GeneralMeasurement) -> String {
    let parts: Vec<String> = m
        .iter()
        .map(|(op, label)| {
            let l: Vec<String> = label.iter().map(i64::to_string).collect();
            format!("[{}]: {}", l.join(", "), format_compact(op))
        })
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn write_meas(m: &MeasSpec, out: &mut String) {
    match &m.name {
        Some(n) => out.push_str(n),
        None => out.push_str(&pretty_measurement_literal(&m.meas)),
    }
}

fn num_str(c: f64) -> String {
    format!("{c:?}")
}

pub fn pretty_dist_expr(r: &DistExpr) -> String {
    let mut s = String::new();
    write_dexpr(r, 0, &mut s);
    s
}

// Levels: 1 for + and -, 2 for scaling, 3 for atoms.
fn write_dexpr(r: &DistExpr, min: u8, out: &mut String) {
    match r {
        DistExpr::Expect(e) => {
            out.push_str("E[");
            write_sexpr(e, 0, out);
            out.push(']');
        }
        DistExpr::MExpect {
            vars,
            meas,
            qubits,
            body,
        } => {
            out.push_str(&format!("E[{} ~ ", vars.join(", ")));
            write_meas(meas, out);
            out.push_str(&format!("[{}]](", qubits.join(", ")));
            write_sexpr(body, 0, out);
            out.push(')');
        }
        DistExpr::Num(c) => out.push_str(&num_str(*c)),
        DistExpr::Trace(inner) => {
            out.push_str("tr(");
            write_dexpr(inner, 0, out);
            out.push(')');
        }
        DistExpr::Scale(c, inner) => {
            let paren = 2 < min;
            open(paren, out);
            out.push_str(&format!("{} * ", num_str(*c)));
            write_dexpr(inner, 3, out);
            close(paren, out);
        }
        DistExpr::Add(l, rr) | DistExpr::Sub(l, rr) => {
            let op = if matches!(r, DistExpr::Add(..)) { "+" } else { "-" };
            let paren = 1 < min;
            open(paren, out);
            write_dexpr(l, 1, out);
            out.push_str(&format!(" {op} "));
            write_dexpr(rr, 2, out);
            close(paren, out);
        }
    }
}

pub fn pretty_assn(p: &DistAssn) -> String {
    let mut s = String::new();
    write_assn(p, 0, &mut s);
    s
}

// Levels: 0 for (+), 1 for =>, 2 for ||, 3 for &&, 4 for !, 5 for atoms.
fn write_assn(p: &DistAssn, min: u8, out: &mut String) {
    match p {
        DistAssn::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        DistAssn::Cmp(l, op, r) => {
            let paren = min >= 5;
            open(paren, out);
            write_dexpr(l, 0, out);
            out.push_str(&format!(" {} ", cmp_str(*op)));
            write_dexpr(r, 0, out);
            close(paren, out);
        }
        DistAssn::OPlus { left, right, guard } => {
            let paren = min > 0;
            open(paren, out);
            let lmin = if matches!(**left, DistAssn::OPlus { .. }) { 0 } else { 1 };
            write_assn(left, lmin, out);
            out.push_str(" (+) ");
            write_assn(right, 1, out);
            if let Some(g) = guard {
                out.push_str(" split on ");
                write_sassn(g, 1, out);
            }
            close(paren, out);
        }
        DistAssn::Not(q) => {
            out.push('!');
            write_assn(q, 5, out);
        }
        DistAssn::And(l, r) | DistAssn::Or(l, r) => {
            let (level, op) = if matches!(p, DistAssn::And(..)) { (3, "&&") } else { (2, "||") };
            let paren = level < min;
            open(paren, out);
            write_assn(l, level, out);
            out.push_str(&format!(" {op} "));
            write_assn(r, level + 1, out);
            close(paren, out);
        }
        DistAssn::Implies(l, r) => {
            let paren = 1 < min;
            open(paren, out);
            write_assn(l, 2, out);
            out.push_str(" => ");
            write_assn(r, 1, out);
            close(paren, out);
        }
        DistAssn::Quant { q, var, lo, hi, body } => {
            let paren = min > 0;
            open(paren, out);
            out.push_str(&format!("{} {var} in {lo}..{hi}. ", quant_str(*q)));
            write_assn(body, 0, out);
            close(paren, out);
        }
        DistAssn::Box(psi) => {
            out.push_str("box(");
            write_sassn(psi, 0, out);
            out.push(')');
        }
        DistAssn::CharEq(mu) => {
            out.push_str("is(");
            out.push_str(&mu.to_json().to_string());
            out.push(')');
        }
    }
}

impl fmt::Display for StateExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_state_expr(self))
    }
}

impl fmt::Display for StateAssn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_state_assn(self))
    }
}

impl fmt::Display for DistExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_dist_expr(self))
    }
}

impl fmt::Display for DistAssn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_assn(self))
    }
}
