//! Text format for matrices: `[[re+imi, ...], ...]`.
//!
//! An entry is a sum of real and imaginary terms, e.g. `0.5`, `-2i`, `i`,
//! `0.5-0.25i`, `1e-3+2.5e1i`.

use super::{CMatrix, MathError, C64};

/// Parses a complete matrix literal.
pub fn parse_matrix(text: &str) -> Result<CMatrix, MathError> {
    let (m, used) = parse_matrix_prefix(text)?;
    if !text[used..].trim().is_empty() {
        return Err(MathError::Literal {
            offset: used,
            msg: "trailing characters after matrix literal".into(),
        });
    }
    Ok(m)
}

/// Parses a matrix literal at the start of `text` (leading whitespace
/// allowed) and returns it with the number of bytes consumed.
pub fn parse_matrix_prefix(text: &str) -> Result<(CMatrix, usize), MathError> {
    let mut p = Cursor { src: text.as_bytes(), pos: 0 };
    p.ws();
    p.expect(b'[')?;
    let mut rows = Vec::new();
    loop {
        p.ws();
        p.expect(b'[')?;
        let mut row = Vec::new();
        loop {
            row.push(p.entry()?);
            p.ws();
            if p.eat(b',') {
                continue;
            }
            p.expect(b']')?;
            break;
        }
        rows.push(row);
        p.ws();
        if p.eat(b',') {
            continue;
        }
        p.expect(b']')?;
        break;
    }
    let m = CMatrix::from_rows(rows).map_err(|e| MathError::Literal {
        offset: p.pos,
        msg: e.to_string(),
    })?;
    Ok((m, p.pos))
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, msg: impl Into<String>) -> MathError {
        MathError::Literal {
            offset: self.pos,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), MathError> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", b as char)))
        }
    }

    fn entry(&mut self) -> Result<C64, MathError> {
        let mut acc = C64::new(0.0, 0.0);
        self.ws();
        let mut sign = 1.0;
        if self.eat(b'-') {
            sign = -1.0;
        } else {
            self.eat(b'+');
        }
        loop {
            self.ws();
            acc += self.term()? * sign;
            self.ws();
            if self.eat(b'+') {
                sign = 1.0;
            } else if self.eat(b'-') {
                sign = -1.0;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<C64, MathError> {
        if self.eat(b'i') {
            return Ok(C64::new(0.0, 1.0));
        }
        let start = self.pos;
        while let Some(c) = self.peek() {
            let exp_sign = matches!(c, b'+' | b'-')
                && self.pos > start
                && matches!(self.src[self.pos - 1], b'e' | b'E');
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let v: f64 = s
            .parse()
            .map_err(|_| MathError::Literal {
                offset: start,
                msg: format!("bad number `{s}`"),
            })?;
        if !v.is_finite() {
            return Err(MathError::NonFinite);
        }
        if self.eat(b'i') {
            Ok(C64::new(0.0, v))
        } else {
            Ok(C64::new(v, 0.0))
        }
    }
}

fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

fn write_entries(m: &CMatrix, entry: impl Fn(C64) -> String) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let cells: Vec<String> = m.row(i).iter().map(|z| entry(*z)).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

/// Full-precision literal that parses back to the identical matrix.
pub fn format_exact(m: &CMatrix) -> String {
    write_entries(m, |z| {
        let (re, im) = (clean(z.re), clean(z.im));
        let sign = if im < 0.0 { '-' } else { '+' };
        format!("{re}{sign}{}i", im.abs())
    })
}

/// Like [`format_exact`] but real entries omit the imaginary part.
pub fn format_compact(m: &CMatrix) -> String {
    write_entries(m, |z| {
        let (re, im) = (clean(z.re), clean(z.im));
        if im == 0.0 {
            format!("{re}")
        } else {
            let sign = if im < 0.0 { '-' } else { '+' };
            format!("{re}{sign}{}i", im.abs())
        }
    })
}

/// Fixed six-decimal rendering with negative zero normalised away.
pub fn format_fixed(m: &CMatrix) -> String {
    write_entries(m, |z| {
        let mut re = format!("{:.6}", z.re);
        let mut im = format!("{:.6}", z.im.abs());
        if re == "-0.000000" {
            re = "0.000000".into();
        }
        let sign = if z.im < 0.0 && im != "0.000000" { '-' } else { '+' };
        if im == "-0.000000" {
            im = "0.000000".into();
        }
        format!("{re}{sign}{im}i")
    })
}
