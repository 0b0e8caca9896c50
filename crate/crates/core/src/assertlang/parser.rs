//! Parser for assertion text.
//!
//! ```text
//! P  := Pi ("(+)" Pi ["split" "on" psi])*
//! Pi := Po ["=>" Pi]        Po := Pa ("||" Pa)*      Pa := Pn ("&&" Pn)*
//! Pn := "!" Pn | "true" | "false" | "box" "(" psi ")" | "is" "(" json ")"
//!     | Q z "in" n ".." n "." P | "(" P ")" | r cmp r
//! r  := rt (("+" | "-") rt)*     rt := rf ("*" rf)*
//! rf := "E" "[" e "]" | "E" "[" xs "~" meas "[" qs "]" "]" "(" e ")"
//!     | "tr" "(" r ")" | num | "(" r ")"
//! psi, e: the same shape one level down, with "1_" "{" psi "}" as an atom
//! ```

use std::sync::Arc;

use super::ast::{CmpOp, DistAssn, DistExpr, MeasSpec, Quant, StateAssn, StateExpr};
use crate::lang::lexer::{Lexer, Tok, Token};
use crate::lang::parser::int_value;
use crate::lang::{lookup_measurement, MeasRef, ParseError};
use crate::qmath::{check_measurement, CMatrix, GeneralMeasurement, Label};
use crate::state::Povd;

pub const ASSN_KEYWORDS: &[&str] = &[
    "true", "false", "forall", "exists", "in", "E", "tr", "box", "is", "split", "on",
];

/// Parses a distribution assertion. Measurement names resolve against
/// `measurements` and the built-in `M`.
pub fn parse_assertion(src: &str, measurements: &[MeasRef]) -> Result<DistAssn, ParseError> {
    let mut p = AssnParser::new(src, measurements);
    let a = p.assn()?;
    p.expect_eof()?;
    Ok(a)
}

pub fn parse_state_assertion(src: &str) -> Result<StateAssn, ParseError> {
    let mut p = AssnParser::new(src, &[]);
    let a = p.sassn()?;
    p.expect_eof()?;
    Ok(a)
}

pub fn parse_dist_expr(src: &str, measurements: &[MeasRef]) -> Result<DistExpr, ParseError> {
    let mut p = AssnParser::new(src, measurements);
    let r = p.dexpr()?;
    p.expect_eof()?;
    Ok(r)
}

struct AssnParser<'a, 'm> {
    lx: Lexer<'a>,
    meas: &'m [MeasRef],
}

enum Cmp {
    Plain(CmpOp),
    Swapped(CmpOp),
    Ne,
}

fn cmp_token(t: &Tok) -> Option<Cmp> {
    Some(match t {
        Tok::Eq => Cmp::Plain(CmpOp::Eq),
        Tok::Le => Cmp::Plain(CmpOp::Le),
        Tok::Lt => Cmp::Plain(CmpOp::Lt),
        Tok::Ge => Cmp::Swapped(CmpOp::Le),
        Tok::Gt => Cmp::Swapped(CmpOp::Lt),
        Tok::Ne => Cmp::Ne,
        _ => return None,
    })
}

fn later(a: ParseError, b: ParseError) -> ParseError {
    if (b.line, b.col) > (a.line, a.col) {
        b
    } else {
        a
    }
}

impl<'a, 'm> AssnParser<'a, 'm> {
    fn new(src: &'a str, meas: &'m [MeasRef]) -> Self {
        AssnParser {
            lx: Lexer::new(src).allowing_dollar(),
            meas,
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        let t = self.lx.next()?;
        if t.tok != Tok::Eof {
            return Err(self.lx.error_at(&t, format!("unexpected {} after assertion", t.tok)));
        }
        Ok(())
    }

    fn variable(&mut self) -> Result<(String, Token), ParseError> {
        let (x, t) = self.lx.expect_ident()?;
        if ASSN_KEYWORDS.contains(&x.as_str()) {
            return Err(self.lx.error_at(&t, format!("`{x}` is a keyword, not a variable")));
        }
        Ok((x, t))
    }

    fn signed_int(&mut self) -> Result<i64, ParseError> {
        let neg = self.lx.eat(&Tok::Minus)?;
        let t = self.lx.next()?;
        match t.tok {
            Tok::Int(n) => int_value(n, neg).ok_or_else(|| self.lx.error_at(&t, "integer literal out of range")),
            ref other => Err(self.lx.error_at(&t, format!("expected an integer, found {other}"))),
        }
    }

    fn quant_head(&mut self) -> Result<Option<(Quant, String, i64, i64)>, ParseError> {
        let q = if self.lx.eat_keyword("forall")? {
            Quant::Forall
        } else if self.lx.eat_keyword("exists")? {
            Quant::Exists
        } else {
            return Ok(None);
        };
        let (var, _) = self.variable()?;
        self.lx.expect_keyword("in")?;
        let lo = self.signed_int()?;
        self.lx.expect(&Tok::DotDot)?;
        let hi = self.signed_int()?;
        self.lx.expect(&Tok::Dot)?;
        Ok(Some((q, var, lo, hi)))
    }

    // ---- distribution assertions ----

    fn assn(&mut self) -> Result<DistAssn, ParseError> {
        let mut left = self.imp()?;
        while self.lx.eat(&Tok::OPlus)? {
            let right = self.imp()?;
            let guard = if self.lx.eat_keyword("split")? {
                self.lx.expect_keyword("on")?;
                Some(self.sassn()?)
            } else {
                None
            };
            left = DistAssn::oplus(left, right, guard);
        }
        Ok(left)
    }

    fn imp(&mut self) -> Result<DistAssn, ParseError> {
        let l = self.or()?;
        if self.lx.eat(&Tok::Implies)? {
            return Ok(DistAssn::implies(l, self.imp()?));
        }
        Ok(l)
    }

    fn or(&mut self) -> Result<DistAssn, ParseError> {
        let mut l = self.and()?;
        while self.lx.eat(&Tok::OrOr)? {
            l = DistAssn::or(l, self.and()?);
        }
        Ok(l)
    }

    fn and(&mut self) -> Result<DistAssn, ParseError> {
        let mut l = self.not()?;
        while self.lx.eat(&Tok::AndAnd)? {
            l = DistAssn::and(l, self.not()?);
        }
        Ok(l)
    }

    fn not(&mut self) -> Result<DistAssn, ParseError> {
        if self.lx.eat(&Tok::Bang)? {
            return Ok(DistAssn::not(self.not()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<DistAssn, ParseError> {
        if self.lx.eat_keyword("true")? {
            return Ok(DistAssn::Bool(true));
        }
        if self.lx.eat_keyword("false")? {
            return Ok(DistAssn::Bool(false));
        }
        if self.lx.eat_keyword("box")? {
            self.lx.expect(&Tok::LParen)?;
            let psi = self.sassn()?;
            self.lx.expect(&Tok::RParen)?;
            return Ok(DistAssn::Box(psi));
        }
        if self.lx.at_keyword("is")? {
            let t = self.lx.next()?;
            self.lx.expect(&Tok::LParen)?;
            let json = self.lx.raw_json_object()?;
            let mu = Povd::from_json_str(json).map_err(|e| self.lx.error_at(&t, e.to_string()))?;
            self.lx.expect(&Tok::RParen)?;
            return Ok(DistAssn::CharEq(Box::new(mu)));
        }
        if let Some((q, var, lo, hi)) = self.quant_head()? {
            let body = self.assn()?;
            return Ok(DistAssn::Quant {
                q,
                var,
                lo,
                hi,
                body: Box::new(body),
            });
        }
        if *self.lx.peek_tok()? == Tok::LParen {
            let saved = self.lx.clone();
            self.lx.next()?;
            let first = match self.assn().and_then(|a| self.lx.expect(&Tok::RParen).map(|_| a)) {
                Ok(a) => {
                    let t = self.lx.peek_tok()?;
                    if cmp_token(t).is_none() && !matches!(t, Tok::Plus | Tok::Minus | Tok::Star) {
                        return Ok(a);
                    }
                    None
                }
                Err(e) => Some(e),
            };
            self.lx = saved;
            return match self.comparison() {
                Ok(c) => Ok(c),
                Err(e) => Err(match first {
                    Some(f) => later(f, e),
                    None => e,
                }),
            };
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<DistAssn, ParseError> {
        let l = self.dexpr()?;
        let t = self.lx.next()?;
        let Some(op) = cmp_token(&t.tok) else {
            return Err(self.lx.error_at(&t, format!("expected a comparison, found {}", t.tok)));
        };
        let r = self.dexpr()?;
        Ok(match op {
            Cmp::Plain(op) => DistAssn::Cmp(l, op, r),
            Cmp::Swapped(op) => DistAssn::Cmp(r, op, l),
            Cmp::Ne => DistAssn::not(DistAssn::eq(l, r)),
        })
    }

    // ---- distribution expressions ----

    fn dexpr(&mut self) -> Result<DistExpr, ParseError> {
        let mut l = self.dterm()?;
        loop {
            if self.lx.eat(&Tok::Plus)? {
                l = DistExpr::add(l, self.dterm()?);
            } else if self.lx.eat(&Tok::Minus)? {
                l = DistExpr::sub(l, self.dterm()?);
            } else {
                return Ok(l);
            }
        }
    }

    fn dterm(&mut self) -> Result<DistExpr, ParseError> {
        let mut l = self.dfactor()?;
        while *self.lx.peek_tok()? == Tok::Star {
            let star = self.lx.next()?;
            let r = self.dfactor()?;
            l = match (l, r) {
                (DistExpr::Num(c), r) => DistExpr::scale(c, r),
                (l, DistExpr::Num(c)) => DistExpr::scale(c, l),
                _ => {
                    return Err(self
                        .lx
                        .error_at(&star, "one side of `*` must be a numeric constant"))
                }
            };
        }
        Ok(l)
    }

    fn number(&mut self, negative: bool) -> Result<Option<f64>, ParseError> {
        let v = match *self.lx.peek_tok()? {
            Tok::Int(n) => n as f64,
            Tok::Float(x) => x,
            _ => return Ok(None),
        };
        self.lx.next()?;
        Ok(Some(if negative { -v } else { v }))
    }

    fn dfactor(&mut self) -> Result<DistExpr, ParseError> {
        if self.lx.eat(&Tok::Minus)? {
            if let Some(v) = self.number(true)? {
                return Ok(DistExpr::Num(v));
            }
            return Ok(DistExpr::scale(-1.0, self.dfactor()?));
        }
        if let Some(v) = self.number(false)? {
            return Ok(DistExpr::Num(v));
        }
        if self.lx.eat(&Tok::LParen)? {
            let r = self.dexpr()?;
            self.lx.expect(&Tok::RParen)?;
            return Ok(r);
        }
        if self.lx.eat_keyword("tr")? {
            self.lx.expect(&Tok::LParen)?;
            let r = self.dexpr()?;
            self.lx.expect(&Tok::RParen)?;
            return Ok(DistExpr::trace(r));
        }
        if self.lx.at_keyword("E")? {
            let at = self.lx.next()?;
            self.lx.expect(&Tok::LBracket)?;
            if let Some(vars) = self.binder_list()? {
                return self.mexpect(vars, &at);
            }
            let e = self.sexpr()?;
            self.lx.expect(&Tok::RBracket)?;
            return Ok(DistExpr::Expect(e));
        }
        let t = self.lx.next()?;
        Err(self
            .lx
            .error_at(&t, format!("expected a distribution expression, found {}", t.tok)))
    }

    /// `x, y ~`, or nothing (lexer untouched) if the bracket holds an expression.
    fn binder_list(&mut self) -> Result<Option<Vec<(String, Token)>>, ParseError> {
        let saved = self.lx.clone();
        let mut vars = Vec::new();
        loop {
            match self.lx.expect_ident() {
                Ok(v) => vars.push(v),
                Err(_) => break,
            }
            match self.lx.peek_tok()? {
                Tok::Comma => {
                    self.lx.next()?;
                }
                Tok::Tilde => {
                    self.lx.next()?;
                    return Ok(Some(vars));
                }
                _ => break,
            }
        }
        self.lx = saved;
        Ok(None)
    }

    fn mexpect(&mut self, vars: Vec<(String, Token)>, at: &Token) -> Result<DistExpr, ParseError> {
        for (i, (v, t)) in vars.iter().enumerate() {
            if ASSN_KEYWORDS.contains(&v.as_str()) {
                return Err(self.lx.error_at(t, format!("`{v}` is a keyword, not a variable")));
            }
            if vars[..i].iter().any(|(w, _)| w == v) {
                return Err(self.lx.error_at(t, format!("`{v}` is bound twice")));
            }
        }
        let meas = self.measurement()?;
        if meas.meas.label_width() != vars.len() {
            return Err(self.lx.error_at(
                at,
                format!(
                    "measurement labels have {} components but {} variables are bound",
                    meas.meas.label_width(),
                    vars.len()
                ),
            ));
        }
        let open = self.lx.expect(&Tok::LBracket)?;
        let mut qubits = Vec::new();
        loop {
            let (q, t) = self.variable()?;
            if qubits.contains(&q) {
                return Err(self.lx.error_at(&t, format!("qubit `{q}` listed twice")));
            }
            qubits.push(q);
            self.lx.eat(&Tok::Comma)?;
            if *self.lx.peek_tok()? == Tok::RBracket {
                break;
            }
        }
        self.lx.expect(&Tok::RBracket)?;
        if qubits.len() != meas.meas.arity() {
            return Err(self.lx.error_at(
                &open,
                format!(
                    "measurement acts on {} qubits, {} given",
                    meas.meas.arity(),
                    qubits.len()
                ),
            ));
        }
        self.lx.expect(&Tok::RBracket)?;
        self.lx.expect(&Tok::LParen)?;
        let body = self.sexpr()?;
        self.lx.expect(&Tok::RParen)?;
        Ok(DistExpr::MExpect {
            vars: vars.into_iter().map(|(v, _)| v).collect(),
            meas,
            qubits,
            body,
        })
    }

    fn measurement(&mut self) -> Result<MeasSpec, ParseError> {
        let t = self.lx.peek()?.clone();
        match &t.tok {
            Tok::Ident(name) => {
                self.lx.next()?;
                let m = lookup_measurement(self.meas, name)
                    .ok_or_else(|| self.lx.error_at(&t, format!("unknown measurement `{name}`")))?;
                Ok(MeasSpec::named(&m.name, m.meas))
            }
            Tok::LBrace => {
                self.lx.next()?;
                let mut ops: Vec<CMatrix> = Vec::new();
                let mut labels: Vec<Label> = Vec::new();
                loop {
                    labels.push(self.label()?);
                    self.lx.expect(&Tok::Colon)?;
                    ops.push(self.lx.matrix()?);
                    if !self.lx.eat(&Tok::Comma)? {
                        break;
                    }
                }
                self.lx.expect(&Tok::RBrace)?;
                let m = GeneralMeasurement::with_labels(ops, labels)
                    .map_err(|e| self.lx.error_at(&t, format!("measurement literal: {e}")))?;
                if !check_measurement(&m) {
                    return Err(self
                        .lx
                        .error_at(&t, "measurement literal does not satisfy the completeness equation"));
                }
                Ok(MeasSpec {
                    name: None,
                    meas: Arc::new(m),
                })
            }
            other => Err(self.lx.error_at(&t, format!("expected a measurement, found {other}"))),
        }
    }

    fn label(&mut self) -> Result<Label, ParseError> {
        if !self.lx.eat(&Tok::LBracket)? {
            return Ok(vec![self.signed_int()?]);
        }
        let mut out = Vec::new();
        if self.lx.eat(&Tok::RBracket)? {
            return Ok(out);
        }
        loop {
            out.push(self.signed_int()?);
            if !self.lx.eat(&Tok::Comma)? {
                break;
            }
        }
        self.lx.expect(&Tok::RBracket)?;
        Ok(out)
    }

    // ---- state assertions ----

    fn sassn(&mut self) -> Result<StateAssn, ParseError> {
        let l = self.sor()?;
        if self.lx.eat(&Tok::Implies)? {
            return Ok(StateAssn::implies(l, self.sassn()?));
        }
        Ok(l)
    }

    fn sor(&mut self) -> Result<StateAssn, ParseError> {
        let mut l = self.sand()?;
        while self.lx.eat(&Tok::OrOr)? {
            l = StateAssn::or(l, self.sand()?);
        }
        Ok(l)
    }

    fn sand(&mut self) -> Result<StateAssn, ParseError> {
        let mut l = self.snot()?;
        while self.lx.eat(&Tok::AndAnd)? {
            l = StateAssn::and(l, self.snot()?);
        }
        Ok(l)
    }

    fn snot(&mut self) -> Result<StateAssn, ParseError> {
        if self.lx.eat(&Tok::Bang)? {
            return Ok(StateAssn::not(self.snot()?));
        }
        self.satom()
    }

    fn satom(&mut self) -> Result<StateAssn, ParseError> {
        if self.lx.eat_keyword("true")? {
            return Ok(StateAssn::Bool(true));
        }
        if self.lx.eat_keyword("false")? {
            return Ok(StateAssn::Bool(false));
        }
        if let Some((q, var, lo, hi)) = self.quant_head()? {
            let body = self.sassn()?;
            return Ok(StateAssn::Quant {
                q,
                var,
                lo,
                hi,
                body: Box::new(body),
            });
        }
        if *self.lx.peek_tok()? == Tok::LParen {
            let saved = self.lx.clone();
            self.lx.next()?;
            let first = match self.sassn().and_then(|a| self.lx.expect(&Tok::RParen).map(|_| a)) {
                Ok(a) => {
                    let t = self.lx.peek_tok()?;
                    if cmp_token(t).is_none() && !matches!(t, Tok::Plus | Tok::Minus | Tok::Star) {
                        return Ok(a);
                    }
                    None
                }
                Err(e) => Some(e),
            };
            self.lx = saved;
            return match self.scomparison() {
                Ok(c) => Ok(c),
                Err(e) => Err(match first {
                    Some(f) => later(f, e),
                    None => e,
                }),
            };
        }
        self.scomparison()
    }

    fn scomparison(&mut self) -> Result<StateAssn, ParseError> {
        let l = self.sexpr()?;
        let t = self.lx.next()?;
        let Some(op) = cmp_token(&t.tok) else {
            return Err(self.lx.error_at(&t, format!("expected a comparison, found {}", t.tok)));
        };
        let r = self.sexpr()?;
        Ok(match op {
            Cmp::Plain(op) => StateAssn::Cmp(l, op, r),
            Cmp::Swapped(op) => StateAssn::Cmp(r, op, l),
            Cmp::Ne => StateAssn::not(StateAssn::eq(l, r)),
        })
    }

    fn sexpr(&mut self) -> Result<StateExpr, ParseError> {
        let mut l = self.sterm()?;
        loop {
            if self.lx.eat(&Tok::Plus)? {
                l = StateExpr::add(l, self.sterm()?);
            } else if self.lx.eat(&Tok::Minus)? {
                l = StateExpr::sub(l, self.sterm()?);
            } else {
                return Ok(l);
            }
        }
    }

    fn sterm(&mut self) -> Result<StateExpr, ParseError> {
        let mut l = self.sfactor()?;
        while self.lx.eat(&Tok::Star)? {
            l = StateExpr::mul(l, self.sfactor()?);
        }
        Ok(l)
    }

    fn sfactor(&mut self) -> Result<StateExpr, ParseError> {
        let t = self.lx.next()?;
        match t.tok {
            Tok::Int(n) => int_value(n, false)
                .map(StateExpr::Int)
                .ok_or_else(|| self.lx.error_at(&t, "integer literal out of range")),
            Tok::Minus => {
                if let Tok::Int(n) = *self.lx.peek_tok()? {
                    let lit = self.lx.next()?;
                    return int_value(n, true)
                        .map(StateExpr::Int)
                        .ok_or_else(|| self.lx.error_at(&lit, "integer literal out of range"));
                }
                Ok(StateExpr::sub(StateExpr::Int(0), self.sfactor()?))
            }
            Tok::Indicator => {
                self.lx.expect(&Tok::LBrace)?;
                let psi = self.sassn()?;
                self.lx.expect(&Tok::RBrace)?;
                Ok(StateExpr::ind(psi))
            }
            Tok::LParen => {
                let e = self.sexpr()?;
                self.lx.expect(&Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(ref x) if !ASSN_KEYWORDS.contains(&x.as_str()) => Ok(StateExpr::Var(x.clone())),
            ref other => Err(self
                .lx
                .error_at(&t, format!("expected a state expression, found {other}"))),
        }
    }
}
