//! Small arithmetic expressions over named variables, evaluated exactly.
//!
//! Grammar: `sum := prod (('+'|'-') prod)*`, `prod := unary (('*'|'/') unary)*`,
//! `unary := '-' unary | atom`, `atom := NUMBER | NAME | NAME '(' sum (',' sum)* ')' | '(' sum ')'`.
//! The only callable names are `max` and `min`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{parse_rational, Rational};

const MAX_DEPTH: usize = 128;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Max,
    Min,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Const(Rational),
    Var(String),
    Neg(Box<Formula>),
    Bin(BinOp, Box<Formula>, Box<Formula>),
    Call(Func, Vec<Formula>),
}

impl Formula {
    pub fn parse(text: &str) -> Result<Formula, FormulaError> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
            depth: 0,
        };
        let f = p.sum()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(f)
    }

    pub fn eval(&self, env: &dyn Fn(&str) -> Option<Rational>) -> Result<Rational, FormulaError> {
        Ok(match self {
            Formula::Const(c) => c.clone(),
            Formula::Var(v) => env(v).ok_or_else(|| FormulaError::UnknownVariable(v.clone()))?,
            Formula::Neg(a) => -a.eval(env)?,
            Formula::Bin(op, a, b) => {
                let (x, y) = (a.eval(env)?, b.eval(env)?);
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y.is_zero() {
                            return Err(FormulaError::DivisionByZero);
                        }
                        x / y
                    }
                }
            }
            Formula::Call(func, args) => {
                let mut values = args.iter().map(|a| a.eval(env));
                let first = values.next().expect("calls have an argument")?;
                values.try_fold(first, |acc, v| {
                    let v = v?;
                    Ok(match func {
                        Func::Max => acc.max(v),
                        Func::Min => acc.min(v),
                    })
                })?
            }
        })
    }

    /// Variable names, sorted.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Const(_) => {}
            Formula::Var(v) => {
                out.insert(v.clone());
            }
            Formula::Neg(a) => a.collect_vars(out),
            Formula::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Call(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }
}

// Binding strength of each printed form: sums, products, negations, atoms.
const SUM: u8 = 0;
const PRODUCT: u8 = 1;
const UNARY: u8 = 2;
const ATOM: u8 = 3;

/// Terminating decimal expansion of `|c|`, if it has one.
fn decimal(c: &Rational) -> Option<String> {
    let mut d = c.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return None;
    }
    let k = twos.max(fives);
    let digits = (c.numer().abs() * num_traits::pow(BigInt::from(10), k) / c.denom()).to_string();
    if k == 0 {
        return Some(digits);
    }
    let padded = format!("{digits:0>width$}", width = k + 1);
    let (int_part, frac) = padded.split_at(padded.len() - k);
    Some(format!("{int_part}.{frac}"))
}

impl Formula {
    fn strength(&self) -> u8 {
        match self {
            Formula::Const(c) if decimal(c).is_none() => PRODUCT,
            Formula::Const(c) if c.is_negative() => UNARY,
            Formula::Const(_) => ATOM,
            Formula::Var(_) | Formula::Call(..) => ATOM,
            Formula::Neg(_) => UNARY,
            Formula::Bin(BinOp::Add | BinOp::Sub, ..) => SUM,
            Formula::Bin(..) => PRODUCT,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.strength() < min {
            f.write_str("(")?;
            self.write_bare(f)?;
            return f.write_str(")");
        }
        self.write_bare(f)
    }

    fn write_bare(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(c) => {
                let sign = if c.is_negative() { "-" } else { "" };
                match decimal(c) {
                    Some(d) => write!(f, "{sign}{d}"),
                    None => write!(f, "{sign}{} / {}", c.numer().abs(), c.denom()),
                }
            }
            Formula::Var(v) => f.write_str(v),
            Formula::Neg(a) => {
                f.write_str("-")?;
                a.write_at(f, UNARY)
            }
            Formula::Bin(op, a, b) => {
                let (sym, level) = match op {
                    BinOp::Add => ("+", SUM),
                    BinOp::Sub => ("-", SUM),
                    BinOp::Mul => ("*", PRODUCT),
                    BinOp::Div => ("/", PRODUCT),
                };
                // Left-associative: only the right operand needs the stricter level.
                a.write_at(f, level)?;
                write!(f, " {sym} ")?;
                b.write_at(f, level + 1)
            }
            Formula::Call(func, args) => {
                f.write_str(match func {
                    Func::Max => "max(",
                    Func::Min => "min(",
                })?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    a.write_bare(f)?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Formula {
    // Prints only the parentheses precedence needs, so a parsed formula
    // reprints with the same tree and no deeper nesting than its source.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_bare(f)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> FormulaError {
        FormulaError::Syntax {
            pos: self.pos,
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

    fn enter(&mut self) -> Result<(), FormulaError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error("expression nested too deeply"));
        }
        Ok(())
    }

    fn sum(&mut self) -> Result<Formula, FormulaError> {
        self.enter()?;
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.product()?;
            lhs = Formula::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Formula::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        if self.eat(b'-') {
            self.enter()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Formula::Neg(Box::new(inner)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len() {
                    let c = self.src[self.pos];
                    let exp_sign = (c == b'-' || c == b'+') && matches!(self.src[self.pos - 1], b'e' | b'E');
                    if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                parse_rational(text).map(Formula::Const).ok_or(FormulaError::Syntax {
                    pos: start,
                    message: format!("malformed number `{text}`"),
                })
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                if self.peek() != Some(b'(') {
                    return Ok(Formula::Var(name.to_string()));
                }
                let func = match name {
                    "max" => Func::Max,
                    "min" => Func::Min,
                    _ => {
                        return Err(FormulaError::Syntax {
                            pos: start,
                            message: format!("unknown function `{name}`"),
                        })
                    }
                };
                self.pos += 1;
                let mut args = vec![self.sum()?];
                while self.eat(b',') {
                    args.push(self.sum()?);
                }
                if !self.eat(b')') {
                    return Err(self.error("expected `,` or `)`"));
                }
                Ok(Formula::Call(func, args))
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn eval(text: &str, vars: &[(&str, Rational)]) -> Result<Rational, FormulaError> {
        let f = Formula::parse(text)?;
        f.eval(&|name| vars.iter().find(|(n, _)| *n == name).map(|(_, v)| v.clone()))
    }

    #[test]
    fn precedence_and_functions() {
        assert_eq!(eval("1 + 2 * 3", &[]).unwrap(), int(7));
        assert_eq!(eval("(1 + 2) * 3", &[]).unwrap(), int(9));
        assert_eq!(eval("10 - 2 - 3", &[]).unwrap(), int(5));
        assert_eq!(
            eval("max(v, l) + min(1, 2, 0.5)", &[("v", int(2)), ("l", int(3))]).unwrap(),
            ratio(7, 2)
        );
        assert_eq!(eval("-v / 4", &[("v", int(2))]).unwrap(), ratio(-1, 2));
        assert_eq!(eval("1e1 * 2.5e-1", &[]).unwrap(), ratio(5, 2));
    }

    #[test]
    fn errors() {
        assert!(matches!(eval("x", &[]), Err(FormulaError::UnknownVariable(_))));
        assert_eq!(eval("1/0", &[]), Err(FormulaError::DivisionByZero));
        assert!(matches!(
            Formula::parse("1 +"),
            Err(FormulaError::Syntax { pos: 3, .. })
        ));
        assert!(matches!(
            Formula::parse("foo(1)"),
            Err(FormulaError::Syntax { pos: 0, .. })
        ));
        assert!(matches!(Formula::parse("(1"), Err(FormulaError::Syntax { .. })));
        assert!(Formula::parse(&"(".repeat(1000)).is_err());
        assert!(Formula::parse(&"-".repeat(1000)).is_err());
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "0.25 * v + -1.5",
            "v + l * 2",
            "max(v, -1) - min(a, b / 3)",
            "-(x - -2)",
            "7/4 * t",
        ] {
            let f = Formula::parse(text).unwrap();
            let printed = f.to_string();
            let g = Formula::parse(&printed).unwrap();
            assert_eq!(g, f, "{printed}");
            assert_eq!(g.to_string(), printed);
            let env = |_: &str| Some(int(3));
            assert_eq!(f.eval(&env), g.eval(&env));
        }
    }

    #[test]
    fn printing_adds_no_nesting() {
        assert_eq!(
            Formula::parse("(1 + 2) * -(x - y) - (a - b)").unwrap().to_string(),
            "(1 + 2) * -(x - y) - (a - b)"
        );
        assert_eq!(Formula::parse("((x))").unwrap().to_string(), "x");
        assert_eq!(Formula::parse("0.125 * 1e2").unwrap().to_string(), "0.125 * 100");
        let deep = format!("{}x", "-".repeat(120));
        let f = Formula::parse(&deep).unwrap();
        assert_eq!(Formula::parse(&f.to_string()).unwrap(), f);
        assert_eq!(Formula::Const(ratio(-1, 3)).to_string(), "-1 / 3");
        let third = Formula::Bin(
            BinOp::Div,
            Box::new(Formula::Var("x".into())),
            Box::new(Formula::Const(ratio(-1, 3))),
        );
        assert_eq!(third.to_string(), "x / (-1 / 3)");
    }

    #[test]
    fn variables_are_collected() {
        let f = Formula::parse("theta * v + max(l, v)").unwrap();
        let vars: Vec<_> = f.variables().into_iter().collect();
        assert_eq!(vars, ["l", "theta", "v"]);
    }
}
