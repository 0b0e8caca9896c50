//! Printer producing source that parses back to the same AST.

use super::ast::{AExp, BExp, Com, Program};
use crate::qmath::literal::format_exact;

pub fn pretty(p: &Program) -> String {
    let mut out = String::new();
    if !p.qubits.is_empty() {
        out.push_str(&format!("qubits {};\n", p.qubits.join(", ")));
    }
    for g in &p.gates {
        out.push_str(&format!("gate {} = {};\n", g.name, format_exact(g.gate.matrix())));
    }
    for m in &p.measurements {
        let items: Vec<String> = m
            .meas
            .iter()
            .map(|(op, label)| format!("{}: {}", label[0], format_exact(op)))
            .collect();
        out.push_str(&format!("meas {} = {{ {} }};\n", m.name, items.join(", ")));
    }
    if !out.is_empty() {
        out.push('\n');
    }
    out.push_str("main {\n");
    write_com(&p.body, 1, &mut out);
    out.push_str("\n}\n");
    out
}

/// Multi-line rendering of a command.
pub fn pretty_com(c: &Com) -> String {
    let mut out = String::new();
    write_com(c, 0, &mut out);
    out
}

/// Single-line rendering, used in traces and error messages.
pub fn pretty_com_inline(c: &Com) -> String {
    pretty_com(c)
        .lines()
        .map(str::trim)
        .collect::<Vec<_>>()
        .join(" ")
}

fn indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_block(c: &Com, level: usize, out: &mut String) {
    out.push_str("{\n");
    write_com(c, level + 1, out);
    out.push('\n');
    indent(level, out);
    out.push('}');
}

fn write_com(c: &Com, level: usize, out: &mut String) {
    match c {
        Com::Seq(a, b) => {
            if matches!(**a, Com::Seq(..)) {
                indent(level, out);
                write_block(a, level, out);
            } else {
                write_com(a, level, out);
            }
            out.push_str(";\n");
            write_com(b, level, out);
        }
        _ => {
            indent(level, out);
            write_simple(c, level, out);
        }
    }
}

fn write_simple(c: &Com, level: usize, out: &mut String) {
    match c {
        Com::Skip => out.push_str("skip"),
        Com::Abort => out.push_str("abort"),
        Com::Nil => out.push_str("nil"),
        Com::Assign(x, a) => out.push_str(&format!("{x} := {}", pretty_aexp(a))),
        Com::QInit(q) => out.push_str(&format!("{q} := |0>")),
        Com::QUnit(g, qs) => out.push_str(&format!("{}[{}]", g.name, qs.join(", "))),
        Com::QMeas(x, m, qs) => out.push_str(&format!("{x} := {}[{}]", m.name, qs.join(", "))),
        Com::If(b, c0, c1) => {
            out.push_str(&format!("if {} then ", pretty_bexp(b)));
            write_block(c0, level, out);
            if **c1 != Com::Skip {
                out.push_str(" else ");
                write_block(c1, level, out);
            }
        }
        Com::While(b, body) => {
            out.push_str(&format!("while {} do ", pretty_bexp(b)));
            write_block(body, level, out);
        }
        Com::Seq(..) => write_block(c, level, out),
    }
}

pub fn pretty_aexp(a: &AExp) -> String {
    let mut s = String::new();
    write_aexp(a, 0, &mut s);
    s
}

// Levels: 1 for + and -, 2 for *, 3 for atoms.
fn write_aexp(a: &AExp, min: u8, out: &mut String) {
    let (level, op, l, r) = match a {
        AExp::Int(n) => {
            out.push_str(&n.to_string());
            return;
        }
        AExp::Var(x) => {
            out.push_str(x);
            return;
        }
        AExp::Add(l, r) => (1, "+", l, r),
        AExp::Sub(l, r) => (1, "-", l, r),
        AExp::Mul(l, r) => (2, "*", l, r),
    };
    let paren = level < min;
    if paren {
        out.push('(');
    }
    write_aexp(l, level, out);
    out.push_str(&format!(" {op} "));
    write_aexp(r, level + 1, out);
    if paren {
        out.push(')');
    }
}

pub fn pretty_bexp(b: &BExp) -> String {
    let mut s = String::new();
    write_bexp(b, 0, &mut s);
    s
}

// Levels: 1 for ||, 2 for &&, 3 for !, 4 for atoms.
fn write_bexp(b: &BExp, min: u8, out: &mut String) {
    match b {
        BExp::True => out.push_str("true"),
        BExp::False => out.push_str("false"),
        BExp::Eq(x, y) | BExp::Leq(x, y) => {
            let op = if matches!(b, BExp::Eq(..)) { "=" } else { "<=" };
            let paren = min >= 3;
            if paren {
                out.push('(');
            }
            out.push_str(&format!("{} {op} {}", pretty_aexp(x), pretty_aexp(y)));
            if paren {
                out.push(')');
            }
        }
        BExp::Not(inner) => {
            out.push('!');
            write_bexp(inner, 3, out);
        }
        BExp::And(l, r) | BExp::Or(l, r) => {
            let (level, op) = if matches!(b, BExp::And(..)) { (2, "&&") } else { (1, "||") };
            let paren = level < min;
            if paren {
                out.push('(');
            }
            write_bexp(l, level, out);
            out.push_str(&format!(" {op} "));
            write_bexp(r, level + 1, out);
            if paren {
                out.push(')');
            }
        }
    }
}
