//! Arithmetic expression trees for user-defined nonlinearities.
//!
//! Grammar: `+ - * / ^` with parentheses, float literals, the variables `u`
//! and `v`, and named parameters (resolved to constants at parse time).
//! Derivatives are exact by symbolic differentiation, so custom models get
//! the same Jacobian quality as the built-ins.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    U,
    V,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
}

impl Expr {
    /// Parse `src`, substituting parameter names by their values.
    pub fn parse(src: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0, params };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parameter(alloc::format!(
                "trailing input in expression at token {}",
                p.pos
            )));
        }
        Ok(e.simplified())
    }

    pub fn eval(&self, u: f64, v: f64) -> Result<f64> {
        let val = self.eval_raw(u, v)?;
        if val.is_finite() {
            Ok(val)
        } else {
            Err(Error::Domain(alloc::format!("expression not finite at ({u}, {v})")))
        }
    }

    fn eval_raw(&self, u: f64, v: f64) -> Result<f64> {
        Ok(match self {
            Expr::Num(c) => *c,
            Expr::Var(Var::U) => u,
            Expr::Var(Var::V) => v,
            Expr::Add(a, b) => a.eval_raw(u, v)? + b.eval_raw(u, v)?,
            Expr::Sub(a, b) => a.eval_raw(u, v)? - b.eval_raw(u, v)?,
            Expr::Mul(a, b) => a.eval_raw(u, v)? * b.eval_raw(u, v)?,
            Expr::Div(a, b) => {
                let d = b.eval_raw(u, v)?;
                if d == 0.0 {
                    return Err(Error::Domain(alloc::format!("division by zero at ({u}, {v})")));
                }
                a.eval_raw(u, v)? / d
            }
            Expr::Pow(a, b) => {
                let base = a.eval_raw(u, v)?;
                let exp = b.eval_raw(u, v)?;
                let r = base.powf(exp);
                if r.is_nan() {
                    return Err(Error::Domain(alloc::format!(
                        "{base}^{exp} undefined at ({u}, {v})"
                    )));
                }
                r
            }
            Expr::Neg(a) => -a.eval_raw(u, v)?,
        })
    }

    /// Exact partial derivative. Exponents must be constant (the grammar has
    /// no logarithm, so variable exponents are rejected).
    pub fn derivative(&self, var: Var) -> Result<Self> {
        let d = match self {
            Expr::Num(_) => Expr::Num(0.0),
            Expr::Var(w) => Expr::Num(if *w == var { 1.0 } else { 0.0 }),
            Expr::Add(a, b) => Expr::Add(Box::new(a.derivative(var)?), Box::new(b.derivative(var)?)),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.derivative(var)?), Box::new(b.derivative(var)?)),
            Expr::Mul(a, b) => Expr::Add(
                Box::new(Expr::Mul(Box::new(a.derivative(var)?), b.clone())),
                Box::new(Expr::Mul(a.clone(), Box::new(b.derivative(var)?))),
            ),
            Expr::Div(a, b) => Expr::Div(
                Box::new(Expr::Sub(
                    Box::new(Expr::Mul(Box::new(a.derivative(var)?), b.clone())),
                    Box::new(Expr::Mul(a.clone(), Box::new(b.derivative(var)?))),
                )),
                Box::new(Expr::Mul(b.clone(), b.clone())),
            ),
            Expr::Pow(a, b) => match **b {
                Expr::Num(e) => Expr::Mul(
                    Box::new(Expr::Mul(
                        Box::new(Expr::Num(e)),
                        Box::new(Expr::Pow(a.clone(), Box::new(Expr::Num(e - 1.0)))),
                    )),
                    Box::new(a.derivative(var)?),
                ),
                _ => {
                    return Err(Error::Parameter(
                        "cannot differentiate a variable exponent".into(),
                    ))
                }
            },
            Expr::Neg(a) => Expr::Neg(Box::new(a.derivative(var)?)),
        };
        Ok(d.simplified())
    }

    fn simplified(self) -> Self {
        match self {
            Expr::Add(a, b) => match (a.simplified(), b.simplified()) {
                (Expr::Num(x), Expr::Num(y)) => Expr::Num(x + y),
                (Expr::Num(x), b) if x == 0.0 => b,
                (a, Expr::Num(y)) if y == 0.0 => a,
                (a, b) => Expr::Add(Box::new(a), Box::new(b)),
            },
            Expr::Sub(a, b) => match (a.simplified(), b.simplified()) {
                (Expr::Num(x), Expr::Num(y)) => Expr::Num(x - y),
                (a, Expr::Num(y)) if y == 0.0 => a,
                (Expr::Num(x), b) if x == 0.0 => Expr::Neg(Box::new(b)),
                (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
            },
            Expr::Mul(a, b) => match (a.simplified(), b.simplified()) {
                (Expr::Num(x), Expr::Num(y)) => Expr::Num(x * y),
                (Expr::Num(x), _) | (_, Expr::Num(x)) if x == 0.0 => Expr::Num(0.0),
                (Expr::Num(x), b) if x == 1.0 => b,
                (a, Expr::Num(y)) if y == 1.0 => a,
                (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
            },
            Expr::Div(a, b) => match (a.simplified(), b.simplified()) {
                (a, Expr::Num(y)) if y == 1.0 => a,
                (Expr::Num(x), Expr::Num(y)) if y != 0.0 => Expr::Num(x / y),
                (a, b) => Expr::Div(Box::new(a), Box::new(b)),
            },
            Expr::Pow(a, b) => match (a.simplified(), b.simplified()) {
                (a, Expr::Num(y)) if y == 1.0 => a,
                (_, Expr::Num(y)) if y == 0.0 => Expr::Num(1.0),
                (Expr::Num(x), Expr::Num(y)) => {
                    let r = x.powf(y);
                    if r.is_finite() {
                        Expr::Num(r)
                    } else {
                        Expr::Pow(Box::new(Expr::Num(x)), Box::new(Expr::Num(y)))
                    }
                }
                (a, b) => Expr::Pow(Box::new(a), Box::new(b)),
            },
            Expr::Neg(a) => match a.simplified() {
                Expr::Num(x) => Expr::Num(-x),
                Expr::Neg(inner) => *inner,
                a => Expr::Neg(Box::new(a)),
            },
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            '-' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            '*' => {
                tokens.push(Token::Star);
                i += 1;
            }
            '/' => {
                tokens.push(Token::Slash);
                i += 1;
            }
            '^' => {
                tokens.push(Token::Caret);
                i += 1;
            }
            '(' => {
                tokens.push(Token::LParen);
                i += 1;
            }
            ')' => {
                tokens.push(Token::RParen);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i] as char, '0'..='9' | '.') {
                    i += 1;
                }
                if i < bytes.len() && matches!(bytes[i] as char, 'e' | 'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && matches!(bytes[j] as char, '+' | '-') {
                        j += 1;
                    }
                    if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let value: f64 = text
                    .parse()
                    .map_err(|_| Error::Parameter(alloc::format!("bad number literal '{text}'")))?;
                tokens.push(Token::Num(value));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, 'a'..='z' | 'A'..='Z' | '0'..='9' | '_')
                {
                    i += 1;
                }
                tokens.push(Token::Ident(String::from(&src[start..i])));
            }
            other => {
                return Err(Error::Parameter(alloc::format!(
                    "unexpected character '{other}' in expression"
                )))
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    params: &'a BTreeMap<String, f64>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op) = self.peek().cloned() {
            match op {
                Token::Plus => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Token::Minus => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.peek().cloned() {
            match op {
                Token::Star => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Token::Slash => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.pos += 1;
            // right-associative, unary binds tighter than ^ on the exponent
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.bump() {
            Some(Token::Num(v)) => Ok(Expr::Num(v)),
            Some(Token::Ident(name)) => match name.as_str() {
                "u" => Ok(Expr::Var(Var::U)),
                "v" => Ok(Expr::Var(Var::V)),
                other => self
                    .params
                    .get(other)
                    .map(|v| Expr::Num(*v))
                    .ok_or_else(|| Error::Parameter(alloc::format!("unknown identifier '{other}'"))),
            },
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(Error::Parameter("unbalanced parenthesis".into())),
                }
            }
            other => Err(Error::Parameter(alloc::format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (String::from(*k), *v)).collect()
    }

    #[test]
    fn parses_gray_scott_f() {
        let p = params(&[("b", 0.04), ("k", 0.06)]);
        let e = Expr::parse("-(b+k)*u + u^2*v", &p).unwrap();
        assert!((e.eval(0.5, 0.3).unwrap() - 0.025).abs() < 1e-15);
        assert_eq!(e.eval(0.0, 7.3).unwrap(), 0.0);
    }

    #[test]
    fn precedence_and_unary_minus() {
        let p = BTreeMap::new();
        let e = Expr::parse("2 + 3 * 4 ^ 2 - -1", &p).unwrap();
        assert_eq!(e.eval(0.0, 0.0).unwrap(), 51.0);
        let e = Expr::parse("-u^2", &p).unwrap();
        assert_eq!(e.eval(3.0, 0.0).unwrap(), -9.0);
    }

    #[test]
    fn symbolic_derivative_matches_central_differences() {
        let p = params(&[("c", 1.7)]);
        let e = Expr::parse("c*u^3/v - (u - v)^2 + u*v", &p).unwrap();
        let du = e.derivative(Var::U).unwrap();
        let dv = e.derivative(Var::V).unwrap();
        let h = 1e-6;
        for (u, v) in [(0.7, 1.3), (2.0, 0.5), (1.0, 1.0)] {
            let fd_u = (e.eval(u + h, v).unwrap() - e.eval(u - h, v).unwrap()) / (2.0 * h);
            let fd_v = (e.eval(u, v + h).unwrap() - e.eval(u, v - h).unwrap()) / (2.0 * h);
            assert!((du.eval(u, v).unwrap() - fd_u).abs() < 1e-7);
            assert!((dv.eval(u, v).unwrap() - fd_v).abs() < 1e-7);
        }
    }

    #[test]
    fn domain_errors_surface() {
        let p = BTreeMap::new();
        let e = Expr::parse("1/u", &p).unwrap();
        assert!(e.eval(0.0, 1.0).is_err());
        let e = Expr::parse("u^0.5", &p).unwrap();
        assert!(e.eval(-1.0, 0.0).is_err());
    }

    #[test]
    fn rejects_garbage() {
        let p = BTreeMap::new();
        assert!(Expr::parse("u + ", &p).is_err());
        assert!(Expr::parse("(u", &p).is_err());
        assert!(Expr::parse("u ! v", &p).is_err());
        assert!(Expr::parse("zzz", &p).is_err());
        assert!(Expr::parse("u^v", &p).unwrap().derivative(Var::U).is_err());
    }
}
