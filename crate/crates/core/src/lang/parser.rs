//! Recursive-descent parser for `.qimp` sources.
//!
//! ```text
//! program := decl* "main" block
//! decl    := "qubits" ident ("," ident)* ";"
//!          | "gate" Name "=" matrix ";"
//!          | "meas" Name "=" "{" [int ":"] matrix ("," [int ":"] matrix)* "}" ";"
//! block   := "{" stmt (";" stmt)* [";"] "}"
//! stmt    := "skip" | "abort" | x ":=" aexp | q ":=" "|0>" | U "[" qs "]"
//!          | x ":=" M "[" qs "]" | "if" bexp "then" body ["else" body]
//!          | "while" bexp "do" body | block
//! ```

use std::collections::BTreeSet;
use std::sync::Arc;

use super::ast::{AExp, BExp, Com, GateRef, MeasRef, Program};
use super::lexer::{Lexer, Tok};
use super::ParseError;
use crate::qmath::{check_measurement, gates, CMatrix, GeneralMeasurement, UnitaryGate};

pub const KEYWORDS: &[&str] = &[
    "skip", "abort", "nil", "if", "then", "else", "while", "do", "qubits", "gate", "meas",
    "main", "true", "false",
];

/// Name of the built-in single-qubit computational-basis measurement.
pub const BUILTIN_MEASUREMENT: &str = "M";

pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut p = ProgramParser {
        lx: Lexer::new(src),
        qubits: Vec::new(),
        gates: Vec::new(),
        measurements: Vec::new(),
        classical: BTreeSet::new(),
    };
    p.program()
}

/// Resolves a gate name against built-ins and the program's declarations.
pub fn lookup_gate(prog_gates: &[GateRef], name: &str) -> Option<GateRef> {
    if let Some(m) = gates::builtin(name) {
        let gate = UnitaryGate::new(m).expect("built-in gates are unitary");
        return Some(GateRef {
            name: name.to_string(),
            gate: Arc::new(gate),
        });
    }
    prog_gates.iter().find(|g| g.name == name).cloned()
}

pub fn lookup_measurement(prog_meas: &[MeasRef], name: &str) -> Option<MeasRef> {
    if name == BUILTIN_MEASUREMENT {
        return Some(MeasRef {
            name: name.to_string(),
            meas: Arc::new(GeneralMeasurement::computational(1)),
        });
    }
    prog_meas.iter().find(|m| m.name == name).cloned()
}

struct ProgramParser<'a> {
    lx: Lexer<'a>,
    qubits: Vec<String>,
    gates: Vec<GateRef>,
    measurements: Vec<MeasRef>,
    classical: BTreeSet<String>,
}

impl ProgramParser<'_> {
    fn program(&mut self) -> Result<Program, ParseError> {
        loop {
            if self.lx.eat_keyword("qubits")? {
                self.qubit_decl()?;
            } else if self.lx.eat_keyword("gate")? {
                self.gate_decl()?;
            } else if self.lx.eat_keyword("meas")? {
                self.meas_decl()?;
            } else {
                break;
            }
        }
        if !self.lx.at_keyword("main")? {
            return Err(self.lx.error_here("expected `main`, `qubits`, `gate` or `meas`"));
        }
        self.lx.next()?;
        let body = self.block()?;
        let t = self.lx.next()?;
        if t.tok != Tok::Eof {
            return Err(self.lx.error_at(&t, format!("unexpected {} after main block", t.tok)));
        }
        if let Some(x) = self.classical.iter().find(|x| self.qubits.contains(x)) {
            return Err(ParseError::new(
                1,
                1,
                format!("`{x}` is declared as a qubit but used as a classical variable"),
            ));
        }
        Ok(Program {
            qubits: std::mem::take(&mut self.qubits),
            gates: std::mem::take(&mut self.gates),
            measurements: std::mem::take(&mut self.measurements),
            body,
        })
    }

    fn fresh_name(&mut self, what: &str) -> Result<String, ParseError> {
        let (name, t) = self.lx.expect_ident()?;
        if KEYWORDS.contains(&name.as_str()) {
            return Err(self.lx.error_at(&t, format!("keyword `{name}` cannot name a {what}")));
        }
        let taken = self.qubits.contains(&name)
            || lookup_gate(&self.gates, &name).is_some()
            || lookup_measurement(&self.measurements, &name).is_some();
        if taken {
            return Err(self.lx.error_at(&t, format!("`{name}` is already defined")));
        }
        Ok(name)
    }

    fn qubit_decl(&mut self) -> Result<(), ParseError> {
        loop {
            let q = self.fresh_name("qubit")?;
            self.qubits.push(q);
            if !self.lx.eat(&Tok::Comma)? {
                break;
            }
        }
        self.lx.expect(&Tok::Semi)?;
        Ok(())
    }

    fn gate_decl(&mut self) -> Result<(), ParseError> {
        let name = self.fresh_name("gate")?;
        self.lx.expect(&Tok::Eq)?;
        let at = self.lx.peek()?.clone();
        let m = self.lx.matrix()?;
        let gate = UnitaryGate::new(m)
            .map_err(|e| self.lx.error_at(&at, format!("gate `{name}`: {e}")))?;
        self.lx.expect(&Tok::Semi)?;
        self.gates.push(GateRef {
            name,
            gate: Arc::new(gate),
        });
        Ok(())
    }

    fn meas_decl(&mut self) -> Result<(), ParseError> {
        let name = self.fresh_name("measurement")?;
        self.lx.expect(&Tok::Eq)?;
        let open = self.lx.expect(&Tok::LBrace)?;
        let mut ops: Vec<CMatrix> = Vec::new();
        let mut labels: Vec<Option<i64>> = Vec::new();
        loop {
            let label = match self.lx.peek_tok()?.clone() {
                Tok::Int(_) | Tok::Minus => {
                    let n = self.signed_int()?;
                    self.lx.expect(&Tok::Colon)?;
                    Some(n)
                }
                _ => None,
            };
            labels.push(label);
            ops.push(self.lx.matrix()?);
            if !self.lx.eat(&Tok::Comma)? {
                break;
            }
        }
        self.lx.expect(&Tok::RBrace)?;
        self.lx.expect(&Tok::Semi)?;
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(i, l)| vec![l.unwrap_or(i as i64)])
            .collect();
        let meas = GeneralMeasurement::with_labels(ops, labels)
            .map_err(|e| self.lx.error_at(&open, format!("measurement `{name}`: {e}")))?;
        if !check_measurement(&meas) {
            return Err(self.lx.error_at(
                &open,
                format!("measurement `{name}` does not satisfy the completeness equation"),
            ));
        }
        self.measurements.push(MeasRef {
            name,
            meas: Arc::new(meas),
        });
        Ok(())
    }

    fn signed_int(&mut self) -> Result<i64, ParseError> {
        let neg = self.lx.eat(&Tok::Minus)?;
        let t = self.lx.next()?;
        match t.tok {
            Tok::Int(n) => int_value(n, neg).ok_or_else(|| {
                self.lx.error_at(&t, "integer literal out of range")
            }),
            ref other => Err(self.lx.error_at(&t, format!("expected integer, found {other}"))),
        }
    }

    fn block(&mut self) -> Result<Com, ParseError> {
        self.lx.expect(&Tok::LBrace)?;
        let mut stmts = vec![self.stmt()?];
        while self.lx.eat(&Tok::Semi)? {
            if self.lx.peek_tok()? == &Tok::RBrace {
                break;
            }
            stmts.push(self.stmt()?);
        }
        self.lx.expect(&Tok::RBrace)?;
        Ok(Com::seq_all(stmts))
    }

    fn body(&mut self) -> Result<Com, ParseError> {
        if self.lx.peek_tok()? == &Tok::LBrace {
            self.block()
        } else {
            self.stmt()
        }
    }

    fn stmt(&mut self) -> Result<Com, ParseError> {
        let t = self.lx.peek()?.clone();
        let name = match &t.tok {
            Tok::LBrace => return self.block(),
            Tok::Ident(s) => s.clone(),
            other => return Err(self.lx.error_at(&t, format!("expected a command, found {other}"))),
        };
        match name.as_str() {
            "skip" => {
                self.lx.next()?;
                Ok(Com::Skip)
            }
            "abort" => {
                self.lx.next()?;
                Ok(Com::Abort)
            }
            "nil" => Err(self.lx.error_at(
                &t,
                "`nil` marks terminated configurations and cannot appear in source",
            )),
            "if" => {
                self.lx.next()?;
                let b = self.bexp()?;
                self.lx.expect_keyword("then")?;
                let c0 = self.body()?;
                let c1 = if self.lx.eat_keyword("else")? {
                    self.body()?
                } else {
                    Com::Skip
                };
                Ok(Com::if_then_else(b, c0, c1))
            }
            "while" => {
                self.lx.next()?;
                let b = self.bexp()?;
                self.lx.expect_keyword("do")?;
                let c = self.body()?;
                Ok(Com::while_do(b, c))
            }
            _ if KEYWORDS.contains(&name.as_str()) => {
                Err(self.lx.error_at(&t, format!("unexpected keyword `{name}`")))
            }
            _ => {
                self.lx.next()?;
                match self.lx.peek_tok()?.clone() {
                    Tok::LBracket => self.gate_application(name, &t),
                    Tok::Assign => {
                        self.lx.next()?;
                        self.assignment(name, &t)
                    }
                    other => Err(self.lx.error_here(format!(
                        "expected `:=` or `[` after `{name}`, found {other}"
                    ))),
                }
            }
        }
    }

    fn gate_application(&mut self, name: String, at: &super::lexer::Token) -> Result<Com, ParseError> {
        let gate = lookup_gate(&self.gates, &name)
            .ok_or_else(|| self.lx.error_at(at, format!("unknown gate `{name}`")))?;
        let qs = self.qubit_list()?;
        if qs.len() != gate.gate.arity() {
            return Err(self.lx.error_at(
                at,
                format!(
                    "gate `{name}` acts on {} qubit(s) but is applied to {}",
                    gate.gate.arity(),
                    qs.len()
                ),
            ));
        }
        Ok(Com::QUnit(gate, qs))
    }

    fn assignment(&mut self, target: String, at: &super::lexer::Token) -> Result<Com, ParseError> {
        if self.lx.eat(&Tok::Ket0)? {
            if !self.qubits.contains(&target) {
                return Err(self.lx.error_at(at, format!("undeclared quantum variable `{target}`")));
            }
            return Ok(Com::QInit(target));
        }
        if self.qubits.contains(&target) {
            return Err(self.lx.error_at(
                at,
                format!("qubit `{target}` can only be reset with `{target} := |0>`"),
            ));
        }
        self.classical.insert(target.clone());
        // `x := M[q̄]` is the only assignment whose right-hand side is
        // `Name [`.
        let rhs = self.lx.peek()?.clone();
        if let Tok::Ident(m) = &rhs.tok {
            let m = m.clone();
            if !KEYWORDS.contains(&m.as_str()) {
                let mut look = self.lx_snapshot();
                look.next()?;
                if look.peek_tok()? == &Tok::LBracket {
                    self.lx.next()?;
                    let meas = lookup_measurement(&self.measurements, &m)
                        .ok_or_else(|| self.lx.error_at(&rhs, format!("unknown measurement `{m}`")))?;
                    let qs = self.qubit_list()?;
                    if qs.len() != meas.meas.arity() {
                        return Err(self.lx.error_at(
                            &rhs,
                            format!(
                                "measurement `{m}` acts on {} qubit(s) but is applied to {}",
                                meas.meas.arity(),
                                qs.len()
                            ),
                        ));
                    }
                    return Ok(Com::QMeas(target, meas, qs));
                }
            }
        }
        if matches!(self.lx.peek_tok()?, Tok::Semi | Tok::RBrace | Tok::Eof) {
            return Err(self.lx.error_here(format!(
                "missing right-hand side in assignment to `{target}`"
            )));
        }
        let a = self.aexp()?;
        Ok(Com::Assign(target, a))
    }

    fn lx_snapshot(&self) -> Lexer<'_> {
        self.lx.clone()
    }

    fn qubit_list(&mut self) -> Result<Vec<String>, ParseError> {
        self.lx.expect(&Tok::LBracket)?;
        let mut qs: Vec<String> = Vec::new();
        loop {
            let (q, t) = self.lx.expect_ident()?;
            if !self.qubits.contains(&q) {
                return Err(self.lx.error_at(&t, format!("undeclared quantum variable `{q}`")));
            }
            if qs.contains(&q) {
                return Err(self.lx.error_at(&t, format!("qubit `{q}` listed twice")));
            }
            qs.push(q);
            // Accept both `CNOT[q0, q1]` and `CNOT[q0 q1]`.
            if self.lx.eat(&Tok::Comma)? {
                continue;
            }
            if matches!(self.lx.peek_tok()?, Tok::Ident(_)) {
                continue;
            }
            break;
        }
        self.lx.expect(&Tok::RBracket)?;
        Ok(qs)
    }

    fn bexp(&mut self) -> Result<BExp, ParseError> {
        let mut lhs = self.band()?;
        while self.lx.eat(&Tok::OrOr)? {
            let rhs = self.band()?;
            lhs = BExp::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn band(&mut self) -> Result<BExp, ParseError> {
        let mut lhs = self.bnot()?;
        while self.lx.eat(&Tok::AndAnd)? {
            let rhs = self.bnot()?;
            lhs = BExp::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn bnot(&mut self) -> Result<BExp, ParseError> {
        if self.lx.eat(&Tok::Bang)? {
            return Ok(BExp::not(self.bnot()?));
        }
        self.batom()
    }

    fn batom(&mut self) -> Result<BExp, ParseError> {
        if self.lx.eat_keyword("true")? {
            return Ok(BExp::True);
        }
        if self.lx.eat_keyword("false")? {
            return Ok(BExp::False);
        }
        if self.lx.peek_tok()? == &Tok::LParen {
            // `(b)` or an arithmetic comparison starting with `(`.
            let saved = self.lx.clone();
            let saved_classical = self.classical.clone();
            self.lx.next()?;
            if let Ok(b) = self.bexp() {
                if self.lx.eat(&Tok::RParen)? {
                    return Ok(b);
                }
            }
            self.lx = saved;
            self.classical = saved_classical;
        }
        let a = self.aexp()?;
        let t = self.lx.next()?;
        if !matches!(t.tok, Tok::Eq | Tok::Le | Tok::Ne | Tok::Lt | Tok::Ge | Tok::Gt) {
            return Err(self
                .lx
                .error_at(&t, format!("expected a comparison operator, found {}", t.tok)));
        }
        let b = self.aexp()?;
        Ok(match t.tok {
            Tok::Eq => BExp::Eq(a, b),
            Tok::Le => BExp::Leq(a, b),
            Tok::Ne => BExp::not(BExp::Eq(a, b)),
            Tok::Lt => BExp::Leq(AExp::add(a, AExp::Int(1)), b),
            Tok::Ge => BExp::Leq(b, a),
            _ => BExp::Leq(AExp::add(b, AExp::Int(1)), a),
        })
    }

    fn aexp(&mut self) -> Result<AExp, ParseError> {
        let mut lhs = self.aterm()?;
        loop {
            if self.lx.eat(&Tok::Plus)? {
                lhs = AExp::add(lhs, self.aterm()?);
            } else if self.lx.eat(&Tok::Minus)? {
                lhs = AExp::sub(lhs, self.aterm()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn aterm(&mut self) -> Result<AExp, ParseError> {
        let mut lhs = self.afactor()?;
        while self.lx.eat(&Tok::Star)? {
            lhs = AExp::mul(lhs, self.afactor()?);
        }
        Ok(lhs)
    }

    fn afactor(&mut self) -> Result<AExp, ParseError> {
        let t = self.lx.next()?;
        match t.tok {
            Tok::Int(n) => int_value(n, false)
                .map(AExp::Int)
                .ok_or_else(|| self.lx.error_at(&t, "integer literal out of range")),
            Tok::Minus => {
                if let Tok::Int(n) = *self.lx.peek_tok()? {
                    let lit = self.lx.next()?;
                    return int_value(n, true)
                        .map(AExp::Int)
                        .ok_or_else(|| self.lx.error_at(&lit, "integer literal out of range"));
                }
                Ok(AExp::sub(AExp::Int(0), self.afactor()?))
            }
            Tok::LParen => {
                let a = self.aexp()?;
                self.lx.expect(&Tok::RParen)?;
                Ok(a)
            }
            Tok::Ident(ref x) => {
                if KEYWORDS.contains(&x.as_str()) {
                    return Err(self.lx.error_at(&t, format!("unexpected keyword `{x}`")));
                }
                if self.qubits.contains(x) {
                    return Err(self.lx.error_at(
                        &t,
                        format!("quantum variable `{x}` cannot occur in a classical expression"),
                    ));
                }
                self.classical.insert(x.clone());
                Ok(AExp::Var(x.clone()))
            }
            ref other => Err(self
                .lx
                .error_at(&t, format!("expected an arithmetic expression, found {other}"))),
        }
    }
}

pub(crate) fn int_value(n: u64, negative: bool) -> Option<i64> {
    if negative {
        if n == 1u64 << 63 {
            Some(i64::MIN)
        } else {
            i64::try_from(n).ok().map(|v| -v)
        }
    } else {
        i64::try_from(n).ok()
    }
}
