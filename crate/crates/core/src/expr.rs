//! Small arithmetic expressions over the absolute generators, e.g.
//! `"I1_5^2 - 3*I2_5/(1 + I1_6)"`.
//!
//! Grammar: `+ - * /`, right-associative `^` with an integer or real exponent,
//! unary minus, parentheses, decimal literals and the variables `I1_i`, `I2_i`.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::invariants::InvariantVector;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var { family: u8, index: usize },
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    source: String,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::ParseError { offset: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Node> {
        let mut lhs = self.product()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.product()?));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
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
            let exp = self.unary()?;
            return Ok(Node::Bin('^', Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                let rest = &self.src[start..];
                let mut end = rest
                    .find(|ch: char| !(ch.is_ascii_digit() || ch == '.'))
                    .unwrap_or(rest.len());
                // exponent part
                if rest[end..].starts_with(['e', 'E']) {
                    let tail = &rest[end + 1..];
                    let sign = usize::from(tail.starts_with(['+', '-']));
                    let digits = tail[sign..].find(|ch: char| !ch.is_ascii_digit()).unwrap_or(tail.len() - sign);
                    if digits > 0 {
                        end += 1 + sign + digits;
                    }
                }
                let text = &rest[..end];
                let v = text.parse().map_err(|_| self.err(format!("invalid number {text:?}")))?;
                self.pos += end;
                Ok(Node::Num(v))
            }
            Some('I') => {
                let start = self.pos;
                let rest = &self.src[start..];
                let end = rest.find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_')).unwrap_or(rest.len());
                let name = &rest[..end];
                let parsed = name
                    .strip_prefix("I1_")
                    .map(|i| (1u8, i))
                    .or_else(|| name.strip_prefix("I2_").map(|i| (2u8, i)))
                    .and_then(|(family, i)| i.parse::<usize>().ok().map(|index| (family, index)));
                match parsed {
                    Some((family, index)) if index >= 5 => {
                        self.pos += end;
                        Ok(Node::Var { family, index })
                    }
                    _ => Err(self.err(format!("unknown variable {name:?}"))),
                }
            }
            Some(c) => Err(self.err(format!("unexpected character {c:?}"))),
            None => Err(self.err("unexpected end of expression")),
        }
    }
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, pos: 0 };
        let root = p.sum()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(Expr { root, source: s.to_string() })
    }
}

impl Expr {
    pub fn source(&self) -> &str {
        &self.source
    }

    /// Largest point index referenced by a variable (4 when there is none).
    pub fn max_index(&self) -> usize {
        fn walk(n: &Node) -> usize {
            match n {
                Node::Num(_) => 4,
                Node::Var { index, .. } => *index,
                Node::Neg(a) => walk(a),
                Node::Bin(_, a, b) => walk(a).max(walk(b)),
            }
        }
        walk(&self.root)
    }

    pub fn eval(&self, v: &InvariantVector) -> Result<f64> {
        fn go(n: &Node, v: &InvariantVector) -> Result<f64> {
            Ok(match n {
                Node::Num(x) => *x,
                Node::Var { family, index } => {
                    let list = if *family == 1 { &v.i1 } else { &v.i2 };
                    *list.get(index - 5).ok_or_else(|| {
                        Error::EvaluationError(format!("I{family}_{index} needs at least {index} points, have {}", v.n))
                    })?
                }
                Node::Neg(a) => -go(a, v)?,
                Node::Bin(op, a, b) => {
                    let (x, y) = (go(a, v)?, go(b, v)?);
                    match op {
                        '+' => x + y,
                        '-' => x - y,
                        '*' => x * y,
                        '/' => {
                            if y == 0.0 {
                                return Err(Error::DivisionByZero("expression".into()));
                            }
                            x / y
                        }
                        _ => {
                            if y.fract() == 0.0 && y.abs() < i32::MAX as f64 {
                                x.powi(y as i32)
                            } else {
                                x.powf(y)
                            }
                        }
                    }
                }
            })
        }
        let out = go(&self.root, v)?;
        if !out.is_finite() {
            return Err(Error::EvaluationError(format!("{} evaluated to {out}", self.source)));
        }
        Ok(out)
    }
}
