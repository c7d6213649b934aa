//! Arithmetic expressions over the coordinates of `Δ'`.
//!
//! Grammar: `+ - * · /`, integer powers `^`, unary minus, `exp(...)`,
//! parentheses, numbers, and variables `x` (same as `x1`), `x1`, `x2`, ...

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
    Exp(Box<Node>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Expression {
    source: String,
    root: Node,
    nvars: usize,
}

impl Expression {
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser { chars: src.char_indices().collect(), pos: 0, max_var: None };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(Self {
            source: src.to_string(),
            root,
            nvars: p.max_var.map_or(0, |v| v + 1),
        })
    }

    /// Number of variables referenced (highest index + 1).
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        value(&self.root, x)
    }

    /// Value and gradient by forward differentiation.
    pub fn eval_with_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        forward(&self.root, x)
    }
}

impl FromStr for Expression {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl TryFrom<String> for Expression {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Self::parse(&s)
    }
}

impl From<Expression> for String {
    fn from(e: Expression) -> String {
        e.source
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

fn value(n: &Node, x: &[f64]) -> f64 {
    match n {
        Node::Num(v) => *v,
        Node::Var(k) => x.get(*k).copied().unwrap_or(f64::NAN),
        Node::Neg(a) => -value(a, x),
        Node::Add(a, b) => value(a, x) + value(b, x),
        Node::Sub(a, b) => value(a, x) - value(b, x),
        Node::Mul(a, b) => value(a, x) * value(b, x),
        Node::Div(a, b) => value(a, x) / value(b, x),
        Node::Pow(a, k) => value(a, x).powi(*k),
        Node::Exp(a) => value(a, x).exp(),
    }
}

fn forward(n: &Node, x: &[f64]) -> (f64, Vec<f64>) {
    let d = x.len();
    let comb = |a: &[f64], sa: f64, b: &[f64], sb: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(p, q)| sa * p + sb * q).collect()
    };
    match n {
        Node::Num(v) => (*v, vec![0.0; d]),
        Node::Var(k) => {
            let mut g = vec![0.0; d];
            if *k < d {
                g[*k] = 1.0;
            }
            (x.get(*k).copied().unwrap_or(f64::NAN), g)
        }
        Node::Neg(a) => {
            let (v, g) = forward(a, x);
            (-v, g.iter().map(|t| -t).collect())
        }
        Node::Add(a, b) => {
            let ((u, gu), (v, gv)) = (forward(a, x), forward(b, x));
            (u + v, comb(&gu, 1.0, &gv, 1.0))
        }
        Node::Sub(a, b) => {
            let ((u, gu), (v, gv)) = (forward(a, x), forward(b, x));
            (u - v, comb(&gu, 1.0, &gv, -1.0))
        }
        Node::Mul(a, b) => {
            let ((u, gu), (v, gv)) = (forward(a, x), forward(b, x));
            (u * v, comb(&gu, v, &gv, u))
        }
        Node::Div(a, b) => {
            let ((u, gu), (v, gv)) = (forward(a, x), forward(b, x));
            (u / v, comb(&gu, 1.0 / v, &gv, -u / (v * v)))
        }
        Node::Pow(a, k) => {
            let (u, gu) = forward(a, x);
            let dv = if *k == 0 { 0.0 } else { *k as f64 * u.powi(k - 1) };
            (u.powi(*k), gu.iter().map(|t| dv * t).collect())
        }
        Node::Exp(a) => {
            let (u, gu) = forward(a, x);
            let e = u.exp();
            (e, gu.iter().map(|t| e * t).collect())
        }
    }
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    max_var: Option<usize>,
}

impl Parser {
    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or_else(|| self.chars.last().map_or(0, |(i, c)| i + c.len_utf8()), |(i, _)| *i)
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse { position: self.offset(), message: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') || self.eat('·') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat('-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            self.skip_ws();
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.error("expected integer exponent"));
            }
            let text: String = self.chars[start..self.pos].iter().map(|(_, c)| *c).collect();
            let k: i32 = text.parse().map_err(|_| self.error("exponent too large"))?;
            return Ok(Node::Pow(Box::new(base), if neg { -k } else { k }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let word: String = self.chars[start..self.pos].iter().map(|(_, c)| *c).collect();
                if word == "exp" {
                    if !self.eat('(') {
                        return Err(self.error("expected `(` after exp"));
                    }
                    let e = self.expr()?;
                    if !self.eat(')') {
                        return Err(self.error("expected `)`"));
                    }
                    return Ok(Node::Exp(Box::new(e)));
                }
                let idx = match word.strip_prefix('x') {
                    Some("") => 0,
                    Some(d) => match d.parse::<usize>() {
                        Ok(k) if k >= 1 => k - 1,
                        _ => {
                            self.pos = start;
                            return Err(self.error(&format!("unknown variable `{word}`")));
                        }
                    },
                    None => {
                        self.pos = start;
                        return Err(self.error(&format!("unknown identifier `{word}`")));
                    }
                };
                self.max_var = Some(self.max_var.map_or(idx, |m| m.max(idx)));
                Ok(Node::Var(idx))
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
            self.pos += 1;
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                self.pos += 1;
            }
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().map(|(_, c)| *c).collect();
        text.parse::<f64>().map(Node::Num).map_err(|_| {
            self.pos = start;
            self.error(&format!("bad number `{text}`"))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: &[f64]) -> f64 {
        Expression::parse(s).unwrap().eval(x)
    }

    #[test]
    fn precedence() {
        assert_eq!(ev("1+x^2/2", &[2.0]), 3.0);
        assert_eq!(ev("-x^2", &[3.0]), -9.0);
        assert_eq!(ev("2*3-4/2", &[]), 4.0);
        assert_eq!(ev("(1+x)·2", &[1.0]), 4.0);
        assert_eq!(ev("x^-1", &[4.0]), 0.25);
        assert!((ev("exp(x/4)", &[4.0]) - 1f64.exp()).abs() < 1e-15);
        assert_eq!(ev("x1 - x2", &[5.0, 2.0]), 3.0);
        assert_eq!(ev("1e-1 + x", &[0.0]), 0.1);
    }

    #[test]
    fn variables_counted() {
        assert_eq!(Expression::parse("x").unwrap().nvars(), 1);
        assert_eq!(Expression::parse("x3 + 1").unwrap().nvars(), 3);
        assert_eq!(Expression::parse("2").unwrap().nvars(), 0);
    }

    #[test]
    fn errors_carry_position() {
        assert!(matches!(Expression::parse("1 + y"), Err(Error::Parse { position: 4, .. })));
        assert!(matches!(Expression::parse("x^"), Err(Error::Parse { .. })));
        assert!(matches!(Expression::parse("(x"), Err(Error::Parse { .. })));
        assert!(matches!(Expression::parse("x x"), Err(Error::Parse { position: 2, .. })));
        assert!(matches!(Expression::parse("x0"), Err(Error::Parse { .. })));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let e = Expression::parse("exp(x1*x2)/(1+x1^2) - 3*x2^3").unwrap();
        let x = [0.4, -0.7];
        let (_, g) = e.eval_with_gradient(&x);
        for k in 0..2 {
            let h = 1e-6;
            let mut a = x;
            let mut b = x;
            a[k] += h;
            b[k] -= h;
            let fd = (e.eval(&a) - e.eval(&b)) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-8);
        }
    }

    #[test]
    fn serde_round_trip() {
        let e = Expression::parse("1 + x^2/2").unwrap();
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, "\"1 + x^2/2\"");
        let back: Expression = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }
}
