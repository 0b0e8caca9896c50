use std::collections::BTreeSet;
use std::sync::Arc;

use crate::qmath::{GeneralMeasurement, UnitaryGate};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AExp {
    Int(i64),
    Var(String),
    Add(Box<AExp>, Box<AExp>),
    Sub(Box<AExp>, Box<AExp>),
    Mul(Box<AExp>, Box<AExp>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BExp {
    True,
    False,
    Eq(AExp, AExp),
    Leq(AExp, AExp),
    Not(Box<BExp>),
    And(Box<BExp>, Box<BExp>),
    Or(Box<BExp>, Box<BExp>),
}

/// A unitary referenced by its source name.
#[derive(Debug, Clone, PartialEq)]
pub struct GateRef {
    pub name: String,
    pub gate: Arc<UnitaryGate>,
}

/// A measurement referenced by its source name.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasRef {
    pub name: String,
    pub meas: Arc<GeneralMeasurement>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Com {
    Skip,
    Abort,
    /// Successful termination; produced by the stepper only.
    Nil,
    Assign(String, AExp),
    Seq(Box<Com>, Box<Com>),
    If(BExp, Box<Com>, Box<Com>),
    While(BExp, Box<Com>),
    QInit(String),
    QUnit(GateRef, Vec<String>),
    QMeas(String, MeasRef, Vec<String>),
}

/// Declarations plus a body.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    /// Declaration order fixes the tensor order of the register.
    pub qubits: Vec<String>,
    pub gates: Vec<GateRef>,
    pub measurements: Vec<MeasRef>,
    pub body: Com,
}

impl AExp {
    pub fn var(name: &str) -> Self {
        AExp::Var(name.to_string())
    }

    pub fn add(a: AExp, b: AExp) -> Self {
        AExp::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: AExp, b: AExp) -> Self {
        AExp::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: AExp, b: AExp) -> Self {
        AExp::Mul(Box::new(a), Box::new(b))
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            AExp::Int(_) => {}
            AExp::Var(x) => {
                out.insert(x.clone());
            }
            AExp::Add(a, b) | AExp::Sub(a, b) | AExp::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut s = BTreeSet::new();
        self.collect_vars(&mut s);
        s
    }
}

impl BExp {
    pub fn eq(a: AExp, b: AExp) -> Self {
        BExp::Eq(a, b)
    }

    pub fn not(b: BExp) -> Self {
        BExp::Not(Box::new(b))
    }

    pub fn and(a: BExp, b: BExp) -> Self {
        BExp::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BExp, b: BExp) -> Self {
        BExp::Or(Box::new(a), Box::new(b))
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            BExp::True | BExp::False => {}
            BExp::Eq(a, b) | BExp::Leq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            BExp::Not(b) => b.collect_vars(out),
            BExp::And(a, b) | BExp::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

impl Com {
    pub fn seq(a: Com, b: Com) -> Self {
        Com::Seq(Box::new(a), Box::new(b))
    }

    /// Right-nested sequence of the given commands; `skip` when empty.
    pub fn seq_all(cmds: impl IntoIterator<Item = Com>) -> Self {
        let mut v: Vec<Com> = cmds.into_iter().collect();
        let Some(mut acc) = v.pop() else {
            return Com::Skip;
        };
        while let Some(c) = v.pop() {
            acc = Com::seq(c, acc);
        }
        acc
    }

    pub fn if_then_else(b: BExp, c0: Com, c1: Com) -> Self {
        Com::If(b, Box::new(c0), Box::new(c1))
    }

    pub fn while_do(b: BExp, body: Com) -> Self {
        Com::While(b, Box::new(body))
    }

    pub fn is_loop_free(&self) -> bool {
        match self {
            Com::While(..) => false,
            Com::Seq(a, b) | Com::If(_, a, b) => a.is_loop_free() && b.is_loop_free(),
            _ => true,
        }
    }

    /// Commands of a sequence chain, flattening nested `Seq` nodes.
    pub fn flatten_seq(&self) -> Vec<&Com> {
        let mut out = Vec::new();
        fn go<'a>(c: &'a Com, out: &mut Vec<&'a Com>) {
            if let Com::Seq(a, b) = c {
                go(a, out);
                go(b, out);
            } else {
                out.push(c);
            }
        }
        go(self, &mut out);
        out
    }

    pub fn collect_classical(&self, out: &mut BTreeSet<String>) {
        match self {
            Com::Skip | Com::Abort | Com::Nil | Com::QInit(_) | Com::QUnit(..) => {}
            Com::Assign(x, a) => {
                out.insert(x.clone());
                a.collect_vars(out);
            }
            Com::QMeas(x, ..) => {
                out.insert(x.clone());
            }
            Com::Seq(a, b) => {
                a.collect_classical(out);
                b.collect_classical(out);
            }
            Com::If(g, a, b) => {
                g.collect_vars(out);
                a.collect_classical(out);
                b.collect_classical(out);
            }
            Com::While(g, c) => {
                g.collect_vars(out);
                c.collect_classical(out);
            }
        }
    }

    pub fn collect_quantum(&self, out: &mut BTreeSet<String>) {
        match self {
            Com::QInit(q) => {
                out.insert(q.clone());
            }
            Com::QUnit(_, qs) | Com::QMeas(_, _, qs) => out.extend(qs.iter().cloned()),
            Com::Seq(a, b) | Com::If(_, a, b) => {
                a.collect_quantum(out);
                b.collect_quantum(out);
            }
            Com::While(_, c) => c.collect_quantum(out),
            _ => {}
        }
    }
}

impl Program {
    /// A program with no user declarations.
    pub fn new(qubits: Vec<String>, body: Com) -> Self {
        Program {
            qubits,
            gates: Vec::new(),
            measurements: Vec::new(),
            body,
        }
    }

    /// Every classical variable the body mentions.
    pub fn classical_vars(&self) -> BTreeSet<String> {
        let mut s = BTreeSet::new();
        self.body.collect_classical(&mut s);
        s
    }

    /// Declared quantum variables in declaration order.
    pub fn quantum_vars(&self) -> &[String] {
        &self.qubits
    }
}

/// Free classical variables of a program body.
pub fn classical_vars(p: &Program) -> BTreeSet<String> {
    p.classical_vars()
}

pub fn quantum_vars(p: &Program) -> Vec<String> {
    p.qubits.clone()
}
