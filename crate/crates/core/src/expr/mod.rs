//! A small, closed expression language for piece evaluators and
//! antiderivatives.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = atom [ "^" unary ] ;
//! atom    = number | "x" | "pi" | "e"
//!         | func "(" expr { "," expr } ")"
//!         | "(" expr ")" ;
//! func    = "exp" | "log" | "sqrt" | "abs" | "pow"
//!         | "sin" | "cos" | "atan" | "floor" ;
//! number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]
//!         | "." digits [ exponent ] ;
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-2^2`
//! is `-(2^2) = -4` and `2^3^2` is `2^9 = 512`. The exponent of `^` may
//! itself carry a leading minus: `2^-1` is `0.5`.
//!
//! Evaluation is total: every domain violation is reported as an
//! [`EvalError`] rather than a NaN.

mod parser;

use std::fmt;

pub use parser::{parse, ParseError};

/// Binary operators, in the order they appear in the grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

/// Named constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Constant::Pi => "pi",
            Constant::E => "e",
        }
    }
}

/// The closed function set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Abs,
    Pow,
    Sin,
    Cos,
    Atan,
    Floor,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
        Func::Pow,
        Func::Sin,
        Func::Cos,
        Func::Atan,
        Func::Floor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Pow => "pow",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Atan => "atan",
            Func::Floor => "floor",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }
}

/// Expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Const(Constant),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalErrorKind {
    DivisionByZero,
    LogDomain,
    SqrtDomain,
    PowDomain,
    NonFinite,
}

impl fmt::Display for EvalErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EvalErrorKind::DivisionByZero => "division by zero",
            EvalErrorKind::LogDomain => "log of a nonpositive number",
            EvalErrorKind::SqrtDomain => "sqrt of a negative number",
            EvalErrorKind::PowDomain => "power outside its real domain",
            EvalErrorKind::NonFinite => "non-finite result",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, thiserror::Error)]
#[error("{kind} at x = {x}")]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub x: f64,
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        if v < 0.0 {
            Expr::Neg(Box::new(Expr::Num(-v)))
        } else {
            Expr::Num(v)
        }
    }

    pub fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Bin(op, Box::new(lhs), Box::new(rhs))
    }

    /// `offset + self`, or `self` when the offset is zero.
    pub fn shifted(self, offset: f64) -> Expr {
        if offset == 0.0 {
            self
        } else {
            Expr::bin(BinOp::Add, Expr::num(offset), self)
        }
    }

    /// `offset - self`.
    pub fn reflected(self, offset: f64) -> Expr {
        Expr::bin(BinOp::Sub, Expr::num(offset), self)
    }

    /// Evaluates at `x`. Any NaN or infinite result is an error.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let v = self.eval_inner(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError {
                kind: EvalErrorKind::NonFinite,
                x,
            })
        }
    }

    fn eval_inner(&self, x: f64) -> Result<f64, EvalError> {
        let err = |kind| EvalError { kind, x };
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var => x,
            Expr::Const(c) => c.value(),
            Expr::Neg(e) => -e.eval_inner(x)?,
            Expr::Bin(op, l, r) => {
                let a = l.eval_inner(x)?;
                let b = r.eval_inner(x)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(err(EvalErrorKind::DivisionByZero));
                        }
                        a / b
                    }
                    BinOp::Pow => power(a, b).ok_or(err(EvalErrorKind::PowDomain))?,
                }
            }
            Expr::Call(func, args) => {
                let a = args[0].eval_inner(x)?;
                match func {
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(err(EvalErrorKind::LogDomain));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(err(EvalErrorKind::SqrtDomain));
                        }
                        a.sqrt()
                    }
                    Func::Abs => a.abs(),
                    Func::Pow => {
                        let b = args[1].eval_inner(x)?;
                        power(a, b).ok_or(err(EvalErrorKind::PowDomain))?
                    }
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Atan => a.atan(),
                    Func::Floor => a.floor(),
                }
            }
        };
        if v.is_nan() {
            return Err(err(EvalErrorKind::NonFinite));
        }
        Ok(v)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }

    fn write_operand(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

fn power(a: f64, b: f64) -> Option<f64> {
    if a == 0.0 && b < 0.0 {
        return None;
    }
    if a < 0.0 && b.fract() != 0.0 {
        return None;
    }
    Some(a.powf(b))
}

/// Renders with the minimum parentheses needed for `parse` to rebuild the
/// same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var => f.write_str("x"),
            Expr::Const(c) => f.write_str(c.name()),
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.write_operand(f, 3)
            }
            Expr::Bin(op, l, r) => {
                let (lp, rp) = match op {
                    BinOp::Add | BinOp::Sub => (1, 2),
                    BinOp::Mul | BinOp::Div => (2, 3),
                    BinOp::Pow => (5, 3),
                };
                l.write_operand(f, lp)?;
                write!(f, " {} ", op.symbol())?;
                r.write_operand(f, rp)
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
