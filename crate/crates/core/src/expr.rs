//! Arithmetic expression grammar for coefficients and polynomials:
//! integers, names, `+ - * / ^` and parentheses. The Unicode minus sign is
//! accepted as `-`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::str::FromStr;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::{self, Poly};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigInt),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().map(|c| if c == '\u{2212}' { '-' } else { c }).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = chars[start..i].iter().collect();
            out.push(Tok::Num(BigInt::from_str(&t).unwrap()));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else if matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Op('('))) {
                // Juxtaposition such as `2x` or `t(q + 1)`.
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let paren = self.eat('(');
            let neg = self.eat('-');
            let n = match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    i64::try_from(n).map_err(|_| Error::Parse("exponent too large".into()))?
                }
                _ => return Err(Error::Parse("expected integer exponent".into())),
            };
            if paren && !self.eat(')') {
                return Err(Error::Parse("expected ')'".into()));
            }
            return Ok(Expr::Pow(Box::new(base), if neg { -n } else { n }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(Expr::Var(s))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("expected ')'".into()));
                }
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

pub fn parse(s: &str) -> Result<Expr> {
    let mut p = Parser { toks: tokenize(s)?, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input in {s:?}")));
    }
    Ok(e)
}

/// Evaluate in a field, resolving names through `var`.
pub fn eval_field<F: Field>(
    k: &F,
    e: &Expr,
    var: &dyn Fn(&str) -> Result<F::Elem>,
) -> Result<F::Elem> {
    Ok(match e {
        Expr::Num(n) => k.from_bigint(n),
        Expr::Var(s) => var(s)?,
        Expr::Neg(a) => k.neg(&eval_field(k, a, var)?),
        Expr::Add(a, b) => k.add(&eval_field(k, a, var)?, &eval_field(k, b, var)?),
        Expr::Sub(a, b) => k.sub(&eval_field(k, a, var)?, &eval_field(k, b, var)?),
        Expr::Mul(a, b) => k.mul(&eval_field(k, a, var)?, &eval_field(k, b, var)?),
        Expr::Div(a, b) => {
            let d = eval_field(k, b, var)?;
            let inv = k.inv(&d).ok_or_else(|| Error::Parse("division by zero".into()))?;
            k.mul(&eval_field(k, a, var)?, &inv)
        }
        Expr::Pow(a, n) => {
            let b = eval_field(k, a, var)?;
            if *n < 0 && k.is_zero(&b) {
                return Err(Error::Parse("zero to a negative power".into()));
            }
            k.pow(&b, *n)
        }
    })
}

/// Evaluate as a polynomial in `x` over `k`; other names are coefficients.
pub fn eval_poly<F: Field>(
    k: &F,
    e: &Expr,
    x: &str,
    var: &dyn Fn(&str) -> Result<F::Elem>,
) -> Result<Poly<F::Elem>> {
    Ok(match e {
        Expr::Num(n) => poly::constant(k, k.from_bigint(n)),
        Expr::Var(s) if s == x => poly::x(k),
        Expr::Var(s) => poly::constant(k, var(s)?),
        Expr::Neg(a) => poly::neg(k, &eval_poly(k, a, x, var)?),
        Expr::Add(a, b) => poly::add(k, &eval_poly(k, a, x, var)?, &eval_poly(k, b, x, var)?),
        Expr::Sub(a, b) => poly::sub(k, &eval_poly(k, a, x, var)?, &eval_poly(k, b, x, var)?),
        Expr::Mul(a, b) => poly::mul(k, &eval_poly(k, a, x, var)?, &eval_poly(k, b, x, var)?),
        Expr::Div(a, b) => {
            let d = eval_poly(k, b, x, var)?;
            if d.len() != 1 {
                return Err(Error::Parse("division by a non-constant".into()));
            }
            poly::scale(k, &eval_poly(k, a, x, var)?, &k.inv(&d[0]).unwrap())
        }
        Expr::Pow(a, n) => {
            let b = eval_poly(k, a, x, var)?;
            if *n < 0 {
                if b.len() != 1 {
                    return Err(Error::Parse("negative power of a non-constant".into()));
                }
                poly::constant(k, k.pow(&b[0], *n))
            } else {
                poly::pow(k, &b, *n as usize)
            }
        }
    })
}

/// Parse a polynomial in `x` whose coefficients are read by the field.
pub fn parse_poly<K: crate::field::ValuedField>(k: &K, s: &str) -> Result<Poly<K::Elem>> {
    eval_poly(k, &parse(s)?, "x", &|name| k.parse_elem(name))
}
