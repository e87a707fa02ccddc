//! Expression parser for series over named variables.
//!
//! ```text
//! expr   := sign? term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | identifier | '(' expr ')'
//! ```
//!
//! Whitespace is ignored. Identifiers are `[A-Za-z_][A-Za-z0-9_]*` and must
//! name a variable. The right operand of `/` must be a nonzero constant, so
//! `1/2*x` and `x/3` are accepted while `1/x` is not.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::powerseries::{PowerSeries, Vars};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(String),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((start, Tok::Int(src[start..i].to_string())));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Parse { pos: i, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser<'a, K> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    vars: &'a Vars,
    truncation: u32,
    _k: std::marker::PhantomData<K>,
}

impl<K: Field> Parser<'_, K> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.here(), msg: msg.into() })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn constant(&self, c: K) -> PowerSeries<K> {
        PowerSeries::constant(self.vars.clone(), c, self.truncation).expect("validated variable count")
    }

    fn expr(&mut self) -> Result<PowerSeries<K>> {
        let mut acc = if self.eat('-') {
            -&self.term()?
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<PowerSeries<K>> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let at = self.here();
                let d = self.unary()?;
                let c = d.constant_term();
                if d.num_terms() > 1 || c.is_zero() {
                    return Err(Error::Parse { pos: at, msg: "divisor must be a nonzero constant".into() });
                }
                acc = acc.scale(&c.inv());
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<PowerSeries<K>> {
        if self.eat('-') {
            Ok(-&self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<PowerSeries<K>> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Int(s)) => {
                    self.pos += 1;
                    let Ok(k) = s.parse::<u32>() else { return self.err("exponent too large") };
                    // Powers of non-units beyond the truncation vanish; avoid
                    // needless work for large exponents.
                    if k > self.truncation && base.constant_term().is_zero() {
                        return Ok(PowerSeries::zero(self.vars.clone(), self.truncation)?);
                    }
                    Ok(base.pow(k))
                }
                _ => self.err("expected a nonnegative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<PowerSeries<K>> {
        match self.peek().cloned() {
            Some(Tok::Int(s)) => {
                self.pos += 1;
                let c = K::parse_exact(&s).ok_or_else(|| Error::Parse { pos: self.here(), msg: "bad literal".into() })?;
                Ok(self.constant(c))
            }
            Some(Tok::Ident(name)) => {
                let at = self.here();
                self.pos += 1;
                PowerSeries::variable(self.vars.clone(), &name, self.truncation).map_err(|_| Error::Parse {
                    pos: at,
                    msg: format!("unknown variable `{name}`"),
                })
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses `src` as a series over `vars` with truncation `truncation`.
pub fn parse_series<K: Field>(src: &str, vars: &Vars, truncation: u32) -> Result<PowerSeries<K>> {
    PowerSeries::<K>::zero(vars.clone(), truncation)?;
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, end: src.len(), vars, truncation, _k: std::marker::PhantomData };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}
