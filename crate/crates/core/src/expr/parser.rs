use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use super::ast::{Coord, FieldExpr, Func};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => *offset,
        }
    }
}

pub fn parse_field_expr(text: &str) -> Result<FieldExpr, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

impl FromStr for FieldExpr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_field_expr(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<FieldExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = FieldExpr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = FieldExpr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<FieldExpr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = FieldExpr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                lhs = FieldExpr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<FieldExpr, ParseError> {
        if self.eat(b'-') {
            return Ok(FieldExpr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let k = self.int()?;
            return Ok(FieldExpr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn int(&mut self) -> Result<i32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if self.pos == digits {
            self.pos = start;
            return Err(self.err("expected integer exponent"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse().map_err(|_| ParseError::Syntax {
            offset: start,
            message: "exponent out of range".into(),
        })
    }

    /// Unsigned decimal with optional fraction and exponent.
    fn decimal(&mut self) -> Option<f64> {
        self.skip_ws();
        let start = self.pos;
        let digit = |p: &Self, i: usize| p.src.get(i).is_some_and(u8::is_ascii_digit);
        let mut i = self.pos;
        while digit(self, i) {
            i += 1;
        }
        if self.src.get(i) == Some(&b'.') {
            i += 1;
            while digit(self, i) {
                i += 1;
            }
        }
        if i == start || (i == start + 1 && self.src[start] == b'.') {
            return None;
        }
        if matches!(self.src.get(i), Some(b'e' | b'E')) {
            let mut j = i + 1;
            if matches!(self.src.get(j), Some(b'+' | b'-')) {
                j += 1;
            }
            if digit(self, j) {
                while digit(self, j) {
                    j += 1;
                }
                i = j;
            }
        }
        let text = std::str::from_utf8(&self.src[start..i]).expect("ascii");
        let v = text.parse().ok()?;
        self.pos = i;
        Some(v)
    }

    fn eat_imag_unit(&mut self) -> bool {
        // no whitespace between a decimal and its `i`
        if self.src.get(self.pos) == Some(&b'i')
            && !self
                .src
                .get(self.pos + 1)
                .is_some_and(|c| c.is_ascii_alphanumeric())
        {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// `( [-] decimal (+|-) decimal i )`; restores the position on mismatch.
    fn paren_literal(&mut self) -> Option<Complex64> {
        let save = self.pos;
        let lit = (|| {
            self.expect(b'(').ok()?;
            let neg = self.eat(b'-');
            let re = self.decimal()?;
            let sign = if self.eat(b'+') {
                1.0
            } else if self.eat(b'-') {
                -1.0
            } else {
                return None;
            };
            let im = self.decimal()?;
            if !self.eat_imag_unit() {
                return None;
            }
            self.expect(b')').ok()?;
            Some(Complex64::new(if neg { -re } else { re }, sign * im))
        })();
        if lit.is_none() {
            self.pos = save;
        }
        lit
    }

    fn atom(&mut self) -> Result<FieldExpr, ParseError> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                if let Some(c) = self.paren_literal() {
                    return Ok(FieldExpr::Const(c));
                }
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let v = self.decimal().ok_or_else(|| self.err("malformed number"))?;
                if self.eat_imag_unit() {
                    Ok(FieldExpr::Const(Complex64::new(0.0, v)))
                } else {
                    Ok(FieldExpr::Const(Complex64::new(v, 0.0)))
                }
            }
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(c) => Err(self.err(&format!("unexpected character `{}`", c as char))),
        }
    }

    fn ident(&mut self) -> Result<FieldExpr, ParseError> {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_alphanumeric) {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if let Some(f) = Func::from_name(name) {
            self.expect(b'(')?;
            let arg = self.expr()?;
            self.expect(b')')?;
            return Ok(FieldExpr::Call(f, Box::new(arg)));
        }
        if name == "t" {
            return Ok(FieldExpr::Var(Coord::T));
        }
        let coord = if let Some(k) = name.strip_prefix("zbar") {
            index(k).map(Coord::Zbar)
        } else if let Some(k) = name.strip_prefix('z') {
            index(k).map(Coord::Z)
        } else {
            None
        };
        coord.map(FieldExpr::Var).ok_or(ParseError::UnknownIdentifier {
            offset: start,
            name: name.to_string(),
        })
    }
}

fn index(s: &str) -> Option<usize> {
    if s.is_empty() || !s.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse().ok().filter(|&k| k >= 1)
}
