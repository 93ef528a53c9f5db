//! JSON function-spec files.
//!
//! ```json
//! {
//!   "format": 1,
//!   "name": "harmonic",
//!   "domain": {"lo": 0, "hi": "inf"},
//!   "pieces": [
//!     {"interval": [0, "inf"], "expr": "1/(1+x)", "direction": "dec",
//!      "left_limit": 1, "right_limit": 0, "antiderivative": "log(1+x)"}
//!   ],
//!   "breakpoints": [{"x": 0, "left": 1, "value": 1, "right": 1}],
//!   "tail": {"limit": 0, "antiderivative": "log(1+x)", "antiderivative_limit": "inf"}
//! }
//! ```
//!
//! Bounds are numbers or the strings `"inf"` / `"-inf"`. `breakpoints` and
//! `tail` may be omitted; `tail` is required for a half-line domain.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bv::{self, Breakpoint, BvFunction, Direction, FunctionSpec, PieceSpec, TailInput};
use crate::error::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Number(f64),
    Named(String),
}

impl Bound {
    fn resolve(&self, field: &str) -> Result<f64, SpecFileError> {
        match self {
            Bound::Number(x) => Ok(*x),
            Bound::Named(s) if s == "inf" || s == "+inf" => Ok(f64::INFINITY),
            Bound::Named(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
            Bound::Named(s) => Err(SpecFileError::Schema(format!(
                "{field}: expected a number, \"inf\" or \"-inf\", found \"{s}\""
            ))),
        }
    }
}

impl From<f64> for Bound {
    fn from(x: f64) -> Self {
        if x == f64::INFINITY {
            Bound::Named("inf".into())
        } else if x == f64::NEG_INFINITY {
            Bound::Named("-inf".into())
        } else {
            Bound::Number(x)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DirectionTag {
    #[serde(rename = "inc")]
    Inc,
    #[serde(rename = "dec")]
    Dec,
    #[serde(rename = "const")]
    Const,
}

impl From<DirectionTag> for Direction {
    fn from(d: DirectionTag) -> Self {
        match d {
            DirectionTag::Inc => Direction::Increasing,
            DirectionTag::Dec => Direction::Decreasing,
            DirectionTag::Const => Direction::Constant,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainEntry {
    pub lo: f64,
    pub hi: Bound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceEntry {
    pub interval: [Bound; 2],
    pub expr: String,
    pub direction: DirectionTag,
    pub left_limit: f64,
    pub right_limit: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antiderivative: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BreakpointEntry {
    pub x: f64,
    pub left: f64,
    pub value: f64,
    pub right: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailEntry {
    pub limit: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antiderivative: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antiderivative_limit: Option<Bound>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpecFile {
    #[serde(default = "default_format")]
    pub format: u32,
    pub name: String,
    pub domain: DomainEntry,
    pub pieces: Vec<PieceEntry>,
    #[serde(default)]
    pub breakpoints: Vec<BreakpointEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailEntry>,
}

fn default_format() -> u32 {
    FORMAT_VERSION
}

#[derive(Debug, thiserror::Error)]
pub enum SpecFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Invalid(#[from] Error),
}

impl FunctionSpecFile {
    pub fn to_spec(&self) -> Result<FunctionSpec, SpecFileError> {
        if self.format != FORMAT_VERSION {
            return Err(SpecFileError::Schema(format!(
                "format: unsupported version {} (expected {FORMAT_VERSION})",
                self.format
            )));
        }
        let pieces = self
            .pieces
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let field = format!("pieces[{i}].interval");
                Ok(PieceSpec {
                    lo: p.interval[0].resolve(&field)?,
                    hi: p.interval[1].resolve(&field)?,
                    expr: p.expr.clone(),
                    direction: p.direction.into(),
                    left_limit: p.left_limit,
                    right_limit: p.right_limit,
                    antiderivative: p.antiderivative.clone(),
                })
            })
            .collect::<Result<Vec<_>, SpecFileError>>()?;
        let tail = match &self.tail {
            Some(t) => Some(TailInput {
                limit: t.limit,
                antiderivative: t.antiderivative.clone(),
                antiderivative_limit: t
                    .antiderivative_limit
                    .as_ref()
                    .map(|b| b.resolve("tail.antiderivative_limit"))
                    .transpose()?,
            }),
            None => None,
        };
        Ok(FunctionSpec {
            name: self.name.clone(),
            lo: self.domain.lo,
            hi: self.domain.hi.resolve("domain.hi")?,
            pieces,
            breakpoints: self
                .breakpoints
                .iter()
                .map(|b| Breakpoint::new(b.x, b.left, b.value, b.right))
                .collect(),
            tail,
        })
    }
}

pub fn parse_spec_file(text: &str) -> Result<FunctionSpecFile, SpecFileError> {
    serde_json::from_str(text).map_err(|e| SpecFileError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Parses and validates a spec file's contents.
pub fn from_str(text: &str) -> Result<BvFunction, SpecFileError> {
    let spec = parse_spec_file(text)?.to_spec()?;
    Ok(bv::validate(&spec)?)
}

pub fn load(path: impl AsRef<Path>) -> Result<BvFunction, SpecFileError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| SpecFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    from_str(&text)
}

/// A spec-file error tagged with the file it came from.
#[derive(Debug)]
pub struct FileError<'a> {
    pub path: &'a Path,
    pub error: &'a SpecFileError,
}

impl fmt::Display for FileError<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = self.path.display();
        match self.error {
            SpecFileError::Invalid(Error::Invalid(violations)) => {
                for (i, v) in violations.iter().enumerate() {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    write!(f, "{path}: {v}")?;
                }
                Ok(())
            }
            SpecFileError::Syntax { line, column, message } => {
                write!(f, "{path}:{line}:{column}: {message}")
            }
            other => write!(f, "{path}: {other}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HARMONIC: &str = r#"{
      "format": 1,
      "name": "harmonic",
      "domain": {"lo": 0, "hi": "inf"},
      "pieces": [{"interval": [0, "inf"], "expr": "1/(1+x)", "direction": "dec",
                  "left_limit": 1, "right_limit": 0, "antiderivative": "log(1+x)"}],
      "breakpoints": [{"x": 0, "left": 1, "value": 1, "right": 1}],
      "tail": {"limit": 0, "antiderivative": "log(1+x)", "antiderivative_limit": "inf"}
    }"#;

    #[test]
    fn loads_half_line() {
        let f = from_str(HARMONIC).unwrap();
        assert!(f.is_half_line());
        assert_eq!(f.tail().unwrap().antiderivative_limit(), Some(f64::INFINITY));
        assert_eq!(f.eval(10.0).unwrap(), 1.0 / 11.0);
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = from_str("{\n  \"name\": \"x\",\n  oops\n}").unwrap_err();
        match err {
            SpecFileError::Syntax { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_and_bad_bounds_are_rejected() {
        let text = HARMONIC.replace("\"format\": 1,", "\"format\": 1, \"extra\": 2,");
        assert!(matches!(from_str(&text), Err(SpecFileError::Syntax { .. })));
        let text = HARMONIC.replace("\"hi\": \"inf\"", "\"hi\": \"infinity\"");
        assert!(matches!(from_str(&text), Err(SpecFileError::Schema(_))));
        let text = HARMONIC.replace("\"format\": 1", "\"format\": 2");
        assert!(matches!(from_str(&text), Err(SpecFileError::Schema(_))));
    }

    #[test]
    fn validation_errors_carry_location() {
        let text = HARMONIC.replace("\"direction\": \"dec\"", "\"direction\": \"inc\"");
        let err = from_str(&text).unwrap_err();
        let shown = FileError {
            path: Path::new("h.json"),
            error: &err,
        }
        .to_string();
        assert!(shown.starts_with("h.json: pieces[0]"), "{shown}");
    }

    #[test]
    fn serializes_back() {
        let file = parse_spec_file(HARMONIC).unwrap();
        let text = serde_json::to_string(&file).unwrap();
        assert_eq!(parse_spec_file(&text).unwrap(), file);
    }
}
