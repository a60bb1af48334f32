//! Recursive-descent parser for the phase-space symbol grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*      division only by nonzero constants
//! unary  := ('-' | '+')* power
//! power  := atom ('^' uint)?                nonnegative integer powers only
//! atom   := number | 'q' | 'p' | 'z' | 'zbar' | 'i' | '(' expr ')'
//! number := digits ('.' digits)? (('e'|'E') sign? digits)? 'i'?
//! ```

use num_complex::Complex64 as C64;
use thiserror::Error;

use super::{SymbolError, SymbolExpr};

/// Syntax error with the character offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    fn new(position: usize, message: impl Into<String>) -> Self {
        Self {
            position,
            message: message.into(),
        }
    }
}

/// Parses a symbol expression into its (z, z̄) normal form.
pub fn parse(text: &str) -> Result<SymbolExpr, ParseError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(ParseError::new(0, "empty expression"));
    }
    let expr = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(ParseError::new(
            p.pos,
            format!("unexpected character '{}'", p.peek().unwrap()),
        ));
    }
    Ok(expr)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn degree_error(pos: usize, err: SymbolError) -> ParseError {
        ParseError::new(pos, err.to_string())
    }

    fn expr(&mut self) -> Result<SymbolExpr, ParseError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some('-') => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<SymbolExpr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => {
                    let op_pos = self.pos;
                    self.bump();
                    let rhs = self.unary()?;
                    acc = acc.mul(&rhs).map_err(|e| Self::degree_error(op_pos, e))?;
                }
                Some('/') => {
                    let op_pos = self.pos;
                    self.bump();
                    let rhs = self.unary()?;
                    let c = rhs.as_constant().ok_or_else(|| {
                        ParseError::new(op_pos, "division is only supported by constants")
                    })?;
                    if c.norm() == 0.0 {
                        return Err(ParseError::new(op_pos, "division by zero"));
                    }
                    acc = acc.scale(C64::new(1.0, 0.0) / c);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<SymbolExpr, ParseError> {
        self.skip_ws();
        let mut negate = false;
        while let Some(c) = self.peek() {
            match c {
                '-' => {
                    negate = !negate;
                    self.bump();
                    self.skip_ws();
                }
                '+' => {
                    self.bump();
                    self.skip_ws();
                }
                _ => break,
            }
        }
        let value = self.power()?;
        Ok(if negate { value.neg() } else { value })
    }

    fn power(&mut self) -> Result<SymbolExpr, ParseError> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() != Some('^') {
            return Ok(base);
        }
        let caret_pos = self.pos;
        self.bump();
        self.skip_ws();
        match self.peek() {
            Some('-') => {
                return Err(ParseError::new(
                    self.pos,
                    "negative powers are not supported",
                ))
            }
            Some(c) if c.is_ascii_digit() => {}
            other => {
                return Err(ParseError::new(
                    self.pos,
                    match other {
                        Some(c) => format!("expected integer exponent, found '{c}'"),
                        None => "expected integer exponent, found end of input".to_string(),
                    },
                ))
            }
        }
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if self.peek() == Some('.') {
            return Err(ParseError::new(
                self.pos,
                "fractional powers are not supported",
            ));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        let n: u32 = digits
            .parse()
            .map_err(|_| ParseError::new(start, "exponent is too large"))?;
        base.pow(n).map_err(|e| Self::degree_error(caret_pos, e))
    }

    fn atom(&mut self) -> Result<SymbolExpr, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                let open_pos = self.pos;
                self.bump();
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(ParseError::new(open_pos, "unbalanced parenthesis"));
                }
                self.bump();
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_alphabetic() => self.ident(),
            Some(c) => Err(ParseError::new(
                self.pos,
                format!("unexpected character '{c}'"),
            )),
            None => Err(ParseError::new(self.pos, "unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<SymbolExpr, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if self.peek() == Some('.') {
            self.bump();
            if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                return Err(ParseError::new(self.pos, "expected digits after decimal point"));
            }
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
        }
        if matches!(self.peek(), Some('e') | Some('E')) {
            // only consume as exponent when followed by a valid exponent body
            let save = self.pos;
            self.bump();
            if matches!(self.peek(), Some('+') | Some('-')) {
                self.bump();
            }
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.bump();
                }
            } else {
                self.pos = save;
            }
        }
        let literal: String = self.chars[start..self.pos].iter().collect();
        let value: f64 = literal
            .parse()
            .map_err(|_| ParseError::new(start, format!("invalid numeric literal {literal:?}")))?;
        if !value.is_finite() {
            return Err(ParseError::new(start, "numeric literal overflows f64"));
        }
        // trailing 'i' marks an imaginary literal
        if self.peek() == Some('i') {
            self.bump();
            Ok(SymbolExpr::constant(C64::new(0.0, value)))
        } else {
            Ok(SymbolExpr::constant(C64::new(value, 0.0)))
        }
    }

    fn ident(&mut self) -> Result<SymbolExpr, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
            self.bump();
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        match name.as_str() {
            "q" => Ok(SymbolExpr::q()),
            "p" => Ok(SymbolExpr::p()),
            "z" => Ok(SymbolExpr::z()),
            "zbar" => Ok(SymbolExpr::zbar()),
            "i" => Ok(SymbolExpr::constant(C64::new(0.0, 1.0))),
            _ => Err(ParseError::new(
                start,
                format!("unknown symbol '{name}' (expected q, p, z, zbar, or i)"),
            )),
        }
    }
}
