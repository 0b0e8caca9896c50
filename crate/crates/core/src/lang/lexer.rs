//! Tokenizer shared by the program and assertion parsers.

use std::fmt;

use super::ParseError;
use crate::qmath::{literal, CMatrix};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    Float(f64),
    /// `|0>`
    Ket0,
    /// `1_` opening an indicator `1_{ψ}`
    Indicator,
    Assign,
    Semi,
    Comma,
    Colon,
    Dot,
    DotDot,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Eq,
    Ne,
    Le,
    Lt,
    Ge,
    Gt,
    Bang,
    AndAnd,
    OrOr,
    Implies,
    Tilde,
    OPlus,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Int(n) => return write!(f, "`{n}`"),
            Tok::Float(x) => return write!(f, "`{x}`"),
            Tok::Ket0 => "|0>",
            Tok::Indicator => "1_",
            Tok::Assign => ":=",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::DotDot => "..",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Le => "<=",
            Tok::Lt => "<",
            Tok::Ge => ">=",
            Tok::Gt => ">",
            Tok::Bang => "!",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Implies => "=>",
            Tok::Tilde => "~",
            Tok::OPlus => "(+)",
            Tok::Eof => return f.write_str("end of input"),
        };
        write!(f, "`{s}`")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub offset: usize,
    pub line: usize,
    pub col: usize,
}

/// Lazily tokenizes a source string with one token of lookahead.
#[derive(Clone)]
pub struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    allow_dollar: bool,
    peeked: Option<Token>,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Self {
        Lexer {
            src,
            pos: 0,
            allow_dollar: false,
            peeked: None,
        }
    }

    /// Accept identifiers starting with `$` (reserved fresh-variable names).
    pub fn allowing_dollar(mut self) -> Self {
        self.allow_dollar = true;
        self
    }

    pub fn peek(&mut self) -> Result<&Token, ParseError> {
        if self.peeked.is_none() {
            let t = self.lex()?;
            self.peeked = Some(t);
        }
        Ok(self.peeked.as_ref().expect("just filled"))
    }

    pub fn peek_tok(&mut self) -> Result<&Tok, ParseError> {
        Ok(&self.peek()?.tok)
    }

    pub fn next(&mut self) -> Result<Token, ParseError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lex(),
        }
    }

    /// Consumes the next token if it equals `tok`.
    pub fn eat(&mut self, tok: &Tok) -> Result<bool, ParseError> {
        if self.peek_tok()? == tok {
            self.next()?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<Token, ParseError> {
        let t = self.next()?;
        if &t.tok == tok {
            Ok(t)
        } else {
            Err(self.error_at(&t, format!("expected {tok}, found {}", t.tok)))
        }
    }

    pub fn expect_ident(&mut self) -> Result<(String, Token), ParseError> {
        let t = self.next()?;
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t)),
            other => Err(self.error_at(&t, format!("expected identifier, found {other}"))),
        }
    }

    /// True if the next token is the identifier `kw`.
    pub fn at_keyword(&mut self, kw: &str) -> Result<bool, ParseError> {
        Ok(matches!(self.peek_tok()?, Tok::Ident(s) if s == kw))
    }

    pub fn eat_keyword(&mut self, kw: &str) -> Result<bool, ParseError> {
        if self.at_keyword(kw)? {
            self.next()?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let t = self.next()?;
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(()),
            other => Err(self.error_at(&t, format!("expected `{kw}`, found {other}"))),
        }
    }

    /// Reads a raw matrix literal starting at the next token.
    pub fn matrix(&mut self) -> Result<CMatrix, ParseError> {
        let start = match self.peeked.take() {
            Some(t) => t.offset,
            None => self.pos,
        };
        match literal::parse_matrix_prefix(&self.src[start..]) {
            Ok((m, used)) => {
                self.pos = start + used;
                Ok(m)
            }
            Err(e) => {
                let at = match &e {
                    crate::qmath::MathError::Literal { offset, .. } => start + offset,
                    _ => start,
                };
                let (line, col) = self.line_col(at);
                Err(ParseError::new(line, col, e.to_string()))
            }
        }
    }

    /// Reads a balanced `{...}` JSON object starting at the next token.
    pub fn raw_json_object(&mut self) -> Result<&'a str, ParseError> {
        let start = match self.peeked.take() {
            Some(t) => t.offset,
            None => {
                self.skip_trivia();
                self.pos
            }
        };
        let bytes = self.src.as_bytes();
        let (line, col) = self.line_col(start);
        if bytes.get(start) != Some(&b'{') {
            return Err(ParseError::new(line, col, "expected a JSON object"));
        }
        let mut depth = 0usize;
        let mut in_str = false;
        let mut escaped = false;
        for (i, &ch) in bytes.iter().enumerate().skip(start) {
            if in_str {
                match ch {
                    _ if escaped => escaped = false,
                    b'\\' => escaped = true,
                    b'"' => in_str = false,
                    _ => {}
                }
                continue;
            }
            match ch {
                b'"' => in_str = true,
                b'{' => depth += 1,
                b'}' => {
                    depth -= 1;
                    if depth == 0 {
                        self.pos = i + 1;
                        return Ok(&self.src[start..=i]);
                    }
                }
                _ => {}
            }
        }
        Err(ParseError::new(line, col, "unterminated JSON object"))
    }

    pub fn error_at(&self, t: &Token, msg: impl Into<String>) -> ParseError {
        ParseError::new(t.line, t.col, msg)
    }

    pub fn error_here(&mut self, msg: impl Into<String>) -> ParseError {
        match self.peek() {
            Ok(t) => ParseError::new(t.line, t.col, msg),
            Err(e) => e,
        }
    }

    fn line_col(&self, offset: usize) -> (usize, usize) {
        let before = &self.src[..offset.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let col = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
        (line, col)
    }

    fn skip_trivia(&mut self) {
        let bytes = self.src.as_bytes();
        loop {
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.src[self.pos..].starts_with("//") {
                while self.pos < bytes.len() && bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn lex(&mut self) -> Result<Token, ParseError> {
        self.skip_trivia();
        let offset = self.pos;
        let (line, col) = self.line_col(offset);
        let mk = |tok| Token {
            tok,
            offset,
            line,
            col,
        };
        let rest = &self.src[self.pos..];
        let Some(c) = rest.chars().next() else {
            return Ok(mk(Tok::Eof));
        };

        const SYMBOLS: &[(&str, Tok)] = &[
            ("(+)", Tok::OPlus),
            ("|0>", Tok::Ket0),
            (":=", Tok::Assign),
            ("..", Tok::DotDot),
            ("!=", Tok::Ne),
            ("<=", Tok::Le),
            (">=", Tok::Ge),
            ("=>", Tok::Implies),
            ("&&", Tok::AndAnd),
            ("||", Tok::OrOr),
            (";", Tok::Semi),
            (",", Tok::Comma),
            (":", Tok::Colon),
            (".", Tok::Dot),
            ("[", Tok::LBracket),
            ("]", Tok::RBracket),
            ("{", Tok::LBrace),
            ("}", Tok::RBrace),
            ("(", Tok::LParen),
            (")", Tok::RParen),
            ("+", Tok::Plus),
            ("-", Tok::Minus),
            ("*", Tok::Star),
            ("=", Tok::Eq),
            ("<", Tok::Lt),
            (">", Tok::Gt),
            ("!", Tok::Bang),
            ("~", Tok::Tilde),
        ];
        if rest.starts_with("1_") {
            self.pos += 2;
            return Ok(mk(Tok::Indicator));
        }
        if c.is_ascii_digit() {
            return self.number(offset).map(mk);
        }
        if c.is_ascii_alphabetic() || c == '_' || (c == '$' && self.allow_dollar) {
            let len = rest
                .char_indices()
                .skip(1)
                .find(|&(_, ch)| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .map_or(rest.len(), |(i, _)| i);
            self.pos += len;
            return Ok(mk(Tok::Ident(rest[..len].to_string())));
        }
        for (sym, tok) in SYMBOLS {
            if rest.starts_with(sym) {
                self.pos += sym.len();
                return Ok(mk(tok.clone()));
            }
        }
        Err(ParseError::new(line, col, format!("unexpected character `{c}`")))
    }

    fn number(&mut self, offset: usize) -> Result<Tok, ParseError> {
        let bytes = self.src.as_bytes();
        let mut end = offset;
        while end < bytes.len() && bytes[end].is_ascii_digit() {
            end += 1;
        }
        let mut is_float = false;
        // A single `.` followed by a digit makes a float; `..` is a range.
        if end + 1 < bytes.len() && bytes[end] == b'.' && bytes[end + 1].is_ascii_digit() {
            is_float = true;
            end += 1;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                is_float = true;
                end = k;
            }
        }
        let text = &self.src[offset..end];
        let (line, col) = self.line_col(offset);
        if end < bytes.len() && (bytes[end].is_ascii_alphabetic() || bytes[end] == b'_') {
            return Err(ParseError::new(line, col, format!("malformed number `{text}...`")));
        }
        self.pos = end;
        if is_float {
            text.parse()
                .map(Tok::Float)
                .map_err(|_| ParseError::new(line, col, format!("bad number `{text}`")))
        } else {
            text.parse()
                .map(Tok::Int)
                .map_err(|_| ParseError::new(line, col, format!("integer `{text}` too large")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        let mut lx = Lexer::new(src).allowing_dollar();
        let mut out = vec![];
        loop {
            let t = lx.next().unwrap();
            if t.tok == Tok::Eof {
                return out;
            }
            out.push(t.tok);
        }
    }

    #[test]
    fn program_tokens() {
        assert_eq!(
            toks("q0 := |0>; // reset\nx := M[q0]"),
            vec![
                Tok::Ident("q0".into()),
                Tok::Assign,
                Tok::Ket0,
                Tok::Semi,
                Tok::Ident("x".into()),
                Tok::Assign,
                Tok::Ident("M".into()),
                Tok::LBracket,
                Tok::Ident("q0".into()),
                Tok::RBracket,
            ]
        );
    }

    #[test]
    fn assertion_tokens() {
        assert_eq!(
            toks("box(x0 != y0) (+) 0.5 * E[1_{true}] split 0..3 $f1"),
            vec![
                Tok::Ident("box".into()),
                Tok::LParen,
                Tok::Ident("x0".into()),
                Tok::Ne,
                Tok::Ident("y0".into()),
                Tok::RParen,
                Tok::OPlus,
                Tok::Float(0.5),
                Tok::Star,
                Tok::Ident("E".into()),
                Tok::LBracket,
                Tok::Indicator,
                Tok::LBrace,
                Tok::Ident("true".into()),
                Tok::RBrace,
                Tok::RBracket,
                Tok::Ident("split".into()),
                Tok::Int(0),
                Tok::DotDot,
                Tok::Int(3),
                Tok::Ident("$f1".into()),
            ]
        );
    }

    #[test]
    fn dollar_rejected_in_programs() {
        let mut lx = Lexer::new("$f0");
        assert!(lx.next().is_err());
    }

    #[test]
    fn positions_are_one_based() {
        let mut lx = Lexer::new("skip;\n  abort");
        lx.next().unwrap();
        lx.next().unwrap();
        let t = lx.next().unwrap();
        assert_eq!((t.line, t.col), (2, 3));
    }

    #[test]
    fn matrix_after_tokens() {
        let mut lx = Lexer::new("= [[0, 1], [1, 0]];");
        lx.expect(&Tok::Eq).unwrap();
        lx.peek().unwrap();
        let m = lx.matrix().unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(lx.next().unwrap().tok, Tok::Semi);
    }
}
