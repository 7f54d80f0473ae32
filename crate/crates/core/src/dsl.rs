//! A small real-valued expression language for weights, symbols and level sets.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' factor)?
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so
//! `-2^2 = -4` and `2^3^2 = 512`. Variables are `x`, `y`, `r`, `theta` (in
//! `(-pi, pi]`) plus the constant `pi`.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("domain error in `{subexpr}`: {message}")]
    Domain { subexpr: String, message: String },
}

impl DslError {
    pub fn is_syntax(&self) -> bool {
        !matches!(self, DslError::Domain { .. })
    }

    pub fn offset(&self) -> Option<usize> {
        match self {
            DslError::Syntax { offset, .. } | DslError::UnknownIdentifier { offset, .. } => {
                Some(*offset)
            }
            DslError::Domain { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    R,
    Theta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
    Re,
    Im,
    ChiPos,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "abs" => Func::Abs,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "re" => Func::Re,
            "im" => Func::Im,
            "chi_pos" => Func::ChiPos,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Re => "re",
            Func::Im => "im",
            Func::ChiPos => "chi_pos",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Parse an expression.
pub fn parse(src: &str) -> Result<Expr, DslError> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn syntax(&self, message: &str) -> DslError {
        DslError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), DslError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(&format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some('+') => BinOp::Add,
                Some('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some('*') => BinOp::Mul,
                Some('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, DslError> {
        if self.peek() == Some('-') {
            self.pos += 1;
            let inner = self.factor()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let exp = self.factor()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, DslError> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.ident(),
            Some(c) => Err(self.syntax(&format!("unexpected character `{c}`"))),
        }
    }

    fn number(&mut self) -> Result<Expr, DslError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = &self.src[start..i];
        match text.parse::<f64>() {
            Ok(v) => {
                self.pos = i;
                Ok(Expr::Num(v))
            }
            Err(_) => Err(DslError::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            }),
        }
    }

    fn ident(&mut self) -> Result<Expr, DslError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
            i += 1;
        }
        let name = &self.src[start..i];
        self.pos = i;
        if self.peek() == Some('(') {
            let func = Func::from_name(name).ok_or_else(|| DslError::UnknownIdentifier {
                offset: start,
                name: name.to_string(),
            })?;
            self.pos += 1;
            let arg = self.expr()?;
            self.expect(')')?;
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        match name {
            "x" => Ok(Expr::Var(Var::X)),
            "y" => Ok(Expr::Var(Var::Y)),
            "r" => Ok(Expr::Var(Var::R)),
            "theta" => Ok(Expr::Var(Var::Theta)),
            "pi" => Ok(Expr::Pi),
            _ => Err(DslError::UnknownIdentifier {
                offset: start,
                name: name.to_string(),
            }),
        }
    }
}

impl Expr {
    /// Evaluate at a point of the disk.
    pub fn eval(&self, z: Complex64) -> Result<f64, DslError> {
        let vars = Vars::at(z);
        self.eval_with(&vars)
    }

    fn eval_with(&self, v: &Vars) -> Result<f64, DslError> {
        let value = match self {
            Expr::Num(x) => *x,
            Expr::Pi => std::f64::consts::PI,
            Expr::Var(Var::X) => v.x,
            Expr::Var(Var::Y) => v.y,
            Expr::Var(Var::R) => v.r,
            Expr::Var(Var::Theta) => v.theta,
            Expr::Neg(e) => -e.eval_with(v)?,
            Expr::Bin(op, a, b) => {
                let a = a.eval_with(v)?;
                let b = b.eval_with(v)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(self.domain("division by zero"));
                        }
                        a / b
                    }
                    BinOp::Pow => pow(a, b),
                }
            }
            Expr::Call(f, arg) => {
                let a = arg.eval_with(v)?;
                match f {
                    Func::Abs => a.abs(),
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(self.domain("log of a nonpositive value"));
                        }
                        a.ln()
                    }
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(self.domain("square root of a negative value"));
                        }
                        a.sqrt()
                    }
                    // the language is real-valued: re is the identity, im vanishes
                    Func::Re => a,
                    Func::Im => 0.0,
                    // ties at zero go to 0
                    Func::ChiPos => {
                        if a > 0.0 {
                            1.0
                        } else {
                            0.0
                        }
                    }
                }
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(self.domain("non-finite result"))
        }
    }

    fn domain(&self, message: &str) -> DslError {
        DslError::Domain {
            subexpr: self.to_string(),
            message: message.to_string(),
        }
    }
}

fn pow(a: f64, b: f64) -> f64 {
    if b.fract() == 0.0 && b.abs() < i32::MAX as f64 {
        a.powi(b as i32)
    } else {
        a.powf(b)
    }
}

struct Vars {
    x: f64,
    y: f64,
    r: f64,
    theta: f64,
}

impl Vars {
    fn at(z: Complex64) -> Self {
        let mut theta = z.im.atan2(z.re);
        if theta <= -std::f64::consts::PI {
            theta = std::f64::consts::PI;
        }
        Self {
            x: z.re,
            y: z.im,
            r: z.norm(),
            theta,
        }
    }
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Bin(BinOp::Pow, ..) => 4,
        _ => 5,
    }
}

impl fmt::Display for Expr {
    /// Prints a normal form with the minimal parentheses needed to reparse
    /// to the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => write!(f, "{x:?}"),
            Expr::Pi => write!(f, "pi"),
            Expr::Var(Var::X) => write!(f, "x"),
            Expr::Var(Var::Y) => write!(f, "y"),
            Expr::Var(Var::R) => write!(f, "r"),
            Expr::Var(Var::Theta) => write!(f, "theta"),
            Expr::Neg(e) => {
                // operand of unary minus: another factor (neg or power or atom)
                if precedence(e) >= 3 {
                    write!(f, "-{e}")
                } else {
                    write!(f, "-({e})")
                }
            }
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
            Expr::Bin(op, a, b) => {
                let p = precedence(self);
                let (sym, left_min, right_min) = match op {
                    BinOp::Add => ("+", 1, 2),
                    BinOp::Sub => (" - ", 1, 2),
                    BinOp::Mul => ("*", 2, 3),
                    BinOp::Div => ("/", 2, 3),
                    // base must be an atom; exponent any factor
                    BinOp::Pow => ("^", 5, 3),
                };
                let _ = p;
                let sym = if sym == "+" { " + " } else { sym };
                if precedence(a) >= left_min {
                    write!(f, "{a}")?;
                } else {
                    write!(f, "({a})")?;
                }
                write!(f, "{sym}")?;
                if precedence(b) >= right_min {
                    write!(f, "{b}")
                } else {
                    write!(f, "({b})")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn at(src: &str, re: f64, im: f64) -> f64 {
        parse(src).unwrap().eval(Complex64::new(re, im)).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse("1").unwrap(), Expr::Num(1.0));
        assert_eq!(at("(1-r^2)^0.5", 0.0, 0.0), 1.0);
        let err = parse("1+").unwrap_err();
        assert_eq!(err.offset(), Some(2));
        assert!(err.is_syntax());
    }

    #[test]
    fn eval_examples() {
        assert!((at("x*x+y*y", 0.3, 0.4) - 0.25).abs() < 1e-15);
        assert_eq!(at("2*(1-r^2)", 0.0, 0.0), 2.0);
        assert_eq!(at("chi_pos(x)", -0.5, 0.0), 0.0);
        assert_eq!(at("chi_pos(x)", 0.0, 0.3), 0.0);
        assert_eq!(at("chi_pos(x)", 0.1, 0.3), 1.0);
    }

    #[test]
    fn precedence_facts() {
        assert_eq!(at("2^3^2", 0.0, 0.0), 512.0);
        assert_eq!(at("-2^2", 0.0, 0.0), -4.0);
        assert_eq!(at("2^-1", 0.0, 0.0), 0.5);
        assert_eq!(at("1-2-3", 0.0, 0.0), -4.0);
        assert_eq!(at("8/4/2", 0.0, 0.0), 1.0);
    }

    #[test]
    fn theta_range() {
        let pi = std::f64::consts::PI;
        assert_eq!(at("theta", -0.5, 0.0), pi);
        assert_eq!(at("theta", -0.5, -0.0), pi);
        assert!((at("theta", 0.0, -0.5) + pi / 2.0).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        match parse("foo + 1").unwrap_err() {
            DslError::UnknownIdentifier { offset, name } => {
                assert_eq!(offset, 0);
                assert_eq!(name, "foo");
            }
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(
            parse("bar(x)").unwrap_err(),
            DslError::UnknownIdentifier { .. }
        ));
        assert!(matches!(parse("(x").unwrap_err(), DslError::Syntax { offset: 2, .. }));
        assert!(matches!(parse("x y").unwrap_err(), DslError::Syntax { offset: 2, .. }));
        let e = parse("1/(r - r)").unwrap().eval(Complex64::new(0.2, 0.0)).unwrap_err();
        match e {
            DslError::Domain { subexpr, .. } => assert_eq!(subexpr, "1.0/(r - r)"),
            e => panic!("unexpected {e:?}"),
        }
        assert!(parse("log(x)").unwrap().eval(Complex64::new(-0.1, 0.0)).is_err());
        assert!(parse("sqrt(x)").unwrap().eval(Complex64::new(-0.1, 0.0)).is_err());
    }

    #[test]
    fn r_squared_matches_coordinates() {
        let a = parse("r^2").unwrap();
        let b = parse("x*x+y*y").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let z = Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(-3.2..3.2));
            assert!((a.eval(z).unwrap() - b.eval(z).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn printing_reparses() {
        for src in ["-(1+x)^2", "(-x)^2", "-x^2", "2^(3^2)", "(2^3)^2", "a"].iter().skip(0) {
            if let Ok(e) = parse(src) {
                let printed = e.to_string();
                assert_eq!(parse(&printed).unwrap(), e, "{src} -> {printed}");
            }
        }
    }
}
