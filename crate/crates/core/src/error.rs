use std::fmt;

use crate::bv::Direction;
use crate::expr::{EvalError, ParseError};

/// One reason a function description was rejected. `location` names the
/// offending entry, e.g. `pieces[2]` or `breakpoints[0]`.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    BadPartition {
        location: String,
        reason: String,
    },
    NonMonotonePiece {
        location: String,
        direction: Direction,
        at: f64,
    },
    InconsistentLimits {
        location: String,
        declared: f64,
        found: f64,
    },
    MissingTail,
    BadExpression {
        location: String,
        error: ParseError,
    },
    EvaluationFailed {
        location: String,
        error: EvalError,
    },
    BadAntiderivative {
        location: String,
        at: f64,
    },
}

impl Violation {
    pub fn location(&self) -> &str {
        match self {
            Violation::BadPartition { location, .. }
            | Violation::NonMonotonePiece { location, .. }
            | Violation::InconsistentLimits { location, .. }
            | Violation::BadExpression { location, .. }
            | Violation::EvaluationFailed { location, .. }
            | Violation::BadAntiderivative { location, .. } => location,
            Violation::MissingTail => "tail",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadPartition { location, reason } => {
                write!(f, "{location}: bad partition: {reason}")
            }
            Violation::NonMonotonePiece {
                location,
                direction,
                at,
            } => write!(f, "{location}: not {direction} near x = {at}"),
            Violation::InconsistentLimits {
                location,
                declared,
                found,
            } => write!(
                f,
                "{location}: inconsistent limits: declared {declared}, found {found}"
            ),
            Violation::MissingTail => f.write_str("tail: half-line domain requires a tail"),
            Violation::BadExpression { location, error } => write!(f, "{location}: {error}"),
            Violation::EvaluationFailed { location, error } => {
                write!(f, "{location}: evaluation failed: {error}")
            }
            Violation::BadAntiderivative { location, at } => write!(
                f,
                "{location}: antiderivative derivative does not match the integrand near x = {at}"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid function:{}", list(.0))]
    Invalid(Vec<Violation>),
    #[error("{x} is outside the domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },
    #[error("exterior limit at x = {x} is unavailable: add a breakpoint there or widen the domain")]
    ExteriorLimitRequired { x: f64 },
    #[error("tolerance {tol:e} unreachable within {cap} subintervals per piece")]
    ToleranceUnreachable { tol: f64, cap: usize },
    #[error("no antiderivative available for the tail integral")]
    MissingAntiderivative,
    #[error("the series diverges")]
    SeriesDivergent,
    #[error("bound {value} is not an integer")]
    NonIntegerBounds { value: f64 },
    #[error("empty or reversed range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("function is not monotone on [{lo}, {hi}]")]
    NotMonotone { lo: f64, hi: f64 },
    #[error("operation requires a half-line domain [a, inf)")]
    NotHalfLine,
    #[error("antiderivative of piece {piece} disagrees with the integrand on [{lo}, {hi}]")]
    BadAntiderivative { piece: usize, lo: f64, hi: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn list(v: &[Violation]) -> String {
    v.iter().map(|x| format!("\n  {x}")).collect()
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Converts an integral-valued float to `i64`.
pub fn to_integer(value: f64) -> Result<i64> {
    if value.is_finite() && value.fract() == 0.0 && value.abs() < 9.0e15 {
        Ok(value as i64)
    } else {
        Err(Error::NonIntegerBounds { value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_conversion() {
        assert_eq!(to_integer(10.0), Ok(10));
        assert_eq!(to_integer(-3.0), Ok(-3));
        assert_eq!(
            to_integer(0.5),
            Err(Error::NonIntegerBounds { value: 0.5 })
        );
        assert!(to_integer(f64::INFINITY).is_err());
    }

    #[test]
    fn invalid_lists_every_violation() {
        let e = Error::Invalid(vec![
            Violation::MissingTail,
            Violation::BadPartition {
                location: "pieces".into(),
                reason: "empty".into(),
            },
        ]);
        let s = e.to_string();
        assert!(s.contains("tail: half-line"));
        assert!(s.contains("pieces: bad partition: empty"));
    }
}
