//! Certified first-order Euler-Maclaurin summation for piecewise-monotone
//! functions of bounded variation.
//!
//! Every approximate quantity comes back as a [`Certified`] value whose
//! radius is a rigorous bound, up to floating-point rounding, on the
//! distance to the exact quantity.
//!
//! ```
//! use bvsum_core::{euler_maclaurin, spec_file};
//!
//! let f = spec_file::from_str(r#"{
//!   "name": "linear",
//!   "domain": {"lo": 0, "hi": 10},
//!   "pieces": [{"interval": [0, 10], "expr": "x", "direction": "inc",
//!               "left_limit": 0, "right_limit": 10, "antiderivative": "x^2/2"}]
//! }"#).unwrap();
//! let r = euler_maclaurin::em_finite_sum(&f, 0, 10, 1e-10).unwrap();
//! assert_eq!(r.exact_sum, Some(45.0));
//! assert!(r.approx.contains(45.0));
//! ```

pub mod bv;
pub mod certified;
pub mod error;
pub mod euler_maclaurin;
pub mod expr;
pub mod measure;
pub mod spec_file;
pub mod sum;

pub use bv::{Breakpoint, BvFunction, Direction, Interval, MonotonePiece, TailSpec};
pub use certified::Certified;
pub use error::{Error, Result, Violation};
pub use expr::{parse, Expr, ParseError};

#[cfg(test)]
pub(crate) mod fixtures;
