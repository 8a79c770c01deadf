//! Scalar literal syntax: rationals, `zN` roots of unity, `sqrt(q)`, `+ - * / ^`.

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use super::coeff::{Coeff, Rational};
use super::cyclotomic::Cyclotomic;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("scalar literal error at column {column}: {message}")]
pub struct LiteralError {
    pub column: usize,
    pub message: String,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, LiteralError> {
        Err(LiteralError { column: self.pos + 1, message: message.into() })
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

    fn digits(&mut self) -> Result<BigInt, LiteralError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(s.parse().expect("digits"))
    }

    fn expr(&mut self) -> Result<Cyclotomic, LiteralError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc + self.term()?;
            } else if self.eat(b'-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Cyclotomic, LiteralError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.unary()?;
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                let d = self.unary()?;
                match d.inverse() {
                    Some(inv) => acc = acc * inv,
                    None => {
                        self.pos = at;
                        return self.err("division by zero");
                    }
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Cyclotomic, LiteralError> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Cyclotomic, LiteralError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let neg = self.eat(b'-');
        let at = self.pos;
        let e: BigInt = self.digits()?;
        let e: u32 = match e.try_into() {
            Ok(e) if e <= 4096 => e,
            _ => {
                self.pos = at;
                return self.err("exponent too large");
            }
        };
        let mut acc = Cyclotomic::one();
        for _ in 0..e {
            acc = acc * base.clone();
        }
        if neg {
            match acc.inverse() {
                Some(inv) => Ok(inv),
                None => {
                    self.pos = at;
                    self.err("zero raised to a negative power")
                }
            }
        } else {
            Ok(acc)
        }
    }

    fn atom(&mut self) -> Result<Cyclotomic, LiteralError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(v)
            }
            Some(b'z') => {
                self.pos += 1;
                let at = self.pos;
                let n = self.digits()?;
                let n: u32 = match n.try_into() {
                    Ok(n) if (1..=10_000).contains(&n) => n,
                    _ => {
                        self.pos = at;
                        return self.err("root of unity order out of range");
                    }
                };
                Ok(Cyclotomic::zeta_pow(n, 1))
            }
            Some(b's') if self.src[self.pos..].starts_with(b"sqrt") => {
                self.pos += 4;
                let at = self.pos;
                if !self.eat(b'(') {
                    return self.err("expected '(' after sqrt");
                }
                let v = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                match v.sqrt() {
                    Some(r) => Ok(r),
                    None => {
                        self.pos = at;
                        self.err("sqrt needs a rational argument")
                    }
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.digits()?;
                Ok(Cyclotomic::from_rational(&Rational::from_integer(n)))
            }
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses a scalar literal such as `1/2*z8^3 - 2`.
pub fn parse_scalar(text: &str) -> Result<Cyclotomic, LiteralError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    if p.peek().is_none() {
        return p.err("empty literal");
    }
    let v = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(v)
}

/// Parses into any coefficient field that contains the value.
pub fn parse_in<C: Coeff>(text: &str) -> Result<C, LiteralError> {
    let v = parse_scalar(text)?;
    C::from_cyclotomic(&v).ok_or(LiteralError { column: 1, message: format!("{} is not in the coefficient field", v) })
}
