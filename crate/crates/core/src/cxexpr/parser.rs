//! Hand-rolled recursive-descent parser for the expression grammar.
//!
//! Grammar (whitespace-insensitive, byte offsets reported on error):
//!
//! ```text
//! expr   := mul (('+' | '-') mul)*
//! mul    := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?          -- right associative
//! atom   := number ['i'] | 'z' | 'i'
//!         | ('conj' | 'exp' | 'log' | 'sqrt') '(' expr ')'
//!         | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus and its exponent must fold to a
//! literal (integer or complex) at parse time.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{ParseError, ParseErrorKind};

use super::ComplexExpr;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Complex64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos >= self.src.len() {
                return Ok(out);
            }
            let start = self.pos;
            let c = self.src[self.pos];
            let tok = match c {
                b'+' => {
                    self.pos += 1;
                    Tok::Plus
                }
                b'-' => {
                    self.pos += 1;
                    Tok::Minus
                }
                b'*' => {
                    self.pos += 1;
                    Tok::Star
                }
                b'/' => {
                    self.pos += 1;
                    Tok::Slash
                }
                b'^' => {
                    self.pos += 1;
                    Tok::Caret
                }
                b'(' => {
                    self.pos += 1;
                    Tok::LParen
                }
                b')' => {
                    self.pos += 1;
                    Tok::RParen
                }
                b'0'..=b'9' | b'.' => self.number(start)?,
                c if c.is_ascii_alphabetic() || c == b'_' => self.ident(start),
                other => {
                    return Err(ParseError {
                        offset: start,
                        kind: ParseErrorKind::UnexpectedChar(other as char),
                    })
                }
            };
            out.push((tok, start));
        }
    }

    fn number(&mut self, start: usize) -> Result<Tok, ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        // scientific exponent, only when unambiguously numeric
        if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
            let mut probe = self.pos + 1;
            if probe < self.src.len() && (self.src[probe] == b'+' || self.src[probe] == b'-') {
                probe += 1;
            }
            if probe < self.src.len() && self.src[probe].is_ascii_digit() {
                self.pos = probe;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let value: f64 = text
            .parse()
            .map_err(|_| ParseError { offset: start, kind: ParseErrorKind::InvalidNumber })?;
        // a trailing `i` (not starting a longer identifier) marks an
        // imaginary literal, e.g. `2i`, `1.5e-3i`
        if self.pos < self.src.len()
            && self.src[self.pos] == b'i'
            && !(self.pos + 1 < self.src.len()
                && (self.src[self.pos + 1].is_ascii_alphanumeric() || self.src[self.pos + 1] == b'_'))
        {
            self.pos += 1;
            return Ok(Tok::Num(Complex64::new(0.0, value)));
        }
        Ok(Tok::Num(Complex64::new(value, 0.0)))
    }

    fn ident(&mut self, start: usize) -> Tok {
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii ident");
        Tok::Ident(String::from(text))
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    cursor: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.cursor).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.cursor).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.cursor).map(|(t, _)| t.clone());
        if t.is_some() {
            self.cursor += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.cursor += 1;
                Ok(())
            }
            Some(t) => Err(ParseError {
                offset: self.offset(),
                kind: ParseErrorKind::UnexpectedToken(tok_name(t)),
            }),
            None => Err(ParseError { offset: self.end, kind: ParseErrorKind::UnexpectedEnd }),
        }
    }

    fn expr(&mut self) -> Result<ComplexExpr, ParseError> {
        let mut lhs = self.mul()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.cursor += 1;
                    let rhs = self.mul()?;
                    lhs = ComplexExpr::add(lhs, rhs);
                }
                Some(Tok::Minus) => {
                    self.cursor += 1;
                    let rhs = self.mul()?;
                    lhs = ComplexExpr::sub(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn mul(&mut self) -> Result<ComplexExpr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.cursor += 1;
                    let rhs = self.unary()?;
                    lhs = ComplexExpr::mul(lhs, rhs);
                }
                Some(Tok::Slash) => {
                    self.cursor += 1;
                    let rhs = self.unary()?;
                    lhs = ComplexExpr::div(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<ComplexExpr, ParseError> {
        if let Some(Tok::Minus) = self.peek() {
            self.cursor += 1;
            let inner = self.unary()?;
            return Ok(ComplexExpr::neg(inner));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ComplexExpr, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.cursor += 1;
            let exp_offset = self.offset();
            let exponent = self.unary()?;
            if !exponent.is_constant_tree() {
                return Err(ParseError {
                    offset: exp_offset,
                    kind: ParseErrorKind::NonConstantExponent,
                });
            }
            let value = exponent.eval(Complex64::new(0.0, 0.0)).map_err(|_| ParseError {
                offset: exp_offset,
                kind: ParseErrorKind::NonConstantExponent,
            })?;
            return Ok(ComplexExpr::pow(base, value));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ComplexExpr, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Some(Tok::Num(w)) => Ok(ComplexExpr::Const(w)),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "z" => Ok(ComplexExpr::Z),
                "i" => Ok(ComplexExpr::Const(Complex64::new(0.0, 1.0))),
                "conj" | "exp" | "log" | "sqrt" => {
                    self.expect(Tok::LParen)?;
                    let inner = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(match name.as_str() {
                        "conj" => inner.conj_expr(),
                        "exp" => ComplexExpr::exp(inner),
                        "log" => ComplexExpr::log(inner),
                        _ => ComplexExpr::sqrt(inner),
                    })
                }
                _ => Err(ParseError { offset, kind: ParseErrorKind::UnknownIdentifier(name) }),
            },
            Some(t) => {
                Err(ParseError { offset, kind: ParseErrorKind::UnexpectedToken(tok_name(&t)) })
            }
            None => Err(ParseError { offset: self.end, kind: ParseErrorKind::UnexpectedEnd }),
        }
    }
}

fn tok_name(t: &Tok) -> String {
    match t {
        Tok::Num(_) => String::from("number"),
        Tok::Ident(s) => s.clone(),
        Tok::Plus => String::from("+"),
        Tok::Minus => String::from("-"),
        Tok::Star => String::from("*"),
        Tok::Slash => String::from("/"),
        Tok::Caret => String::from("^"),
        Tok::LParen => String::from("("),
        Tok::RParen => String::from(")"),
    }
}

pub(super) fn parse(text: &str) -> Result<ComplexExpr, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    if toks.is_empty() {
        return Err(ParseError { offset: 0, kind: ParseErrorKind::EmptyInput });
    }
    let mut parser = Parser { toks, cursor: 0, end: text.len() };
    let expr = parser.expr()?;
    if parser.peek().is_some() {
        return Err(ParseError {
            offset: parser.offset(),
            kind: ParseErrorKind::TrailingInput,
        });
    }
    Ok(expr)
}
