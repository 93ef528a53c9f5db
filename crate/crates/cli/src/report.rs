//! Human and JSON rendering of command results.
//!
//! JSON numbers are written with 17 significant digits so every binary64
//! value round-trips; non-finite values become `null`.

use std::fmt::Write as _;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    Num(f64),
    Int(i64),
    Str(String),
    Bool(bool),
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Field::Num(x) => Num(*x).serialize(s),
            Field::Int(i) => s.serialize_i64(*i),
            Field::Str(v) => s.serialize_str(v),
            Field::Bool(b) => s.serialize_bool(*b),
        }
    }
}

impl Field {
    fn human(&self) -> String {
        match self {
            Field::Num(x) => human_num(*x),
            Field::Int(i) => i.to_string(),
            Field::Str(v) => v.clone(),
            Field::Bool(b) => b.to_string(),
        }
    }
}

fn human_num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::Num(x)
    }
}

impl From<i64> for Field {
    fn from(i: i64) -> Self {
        Field::Int(i)
    }
}

impl From<&str> for Field {
    fn from(s: &str) -> Self {
        Field::Str(s.to_string())
    }
}

impl From<String> for Field {
    fn from(s: String) -> Self {
        Field::Str(s)
    }
}

impl From<bool> for Field {
    fn from(b: bool) -> Self {
        Field::Bool(b)
    }
}

/// Ordered key-value pairs serialized as a JSON object.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Fields(pub Vec<(&'static str, Field)>);

impl Fields {
    pub fn push(&mut self, key: &'static str, value: impl Into<Field>) -> &mut Self {
        self.0.push((key, value.into()));
        self
    }
}

impl Serialize for Fields {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Bounds {
    pub remainder: Num,
    pub quadrature: Num,
}

impl Default for Num {
    fn default() -> Self {
        Num(0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Fields,
    pub value: Option<Num>,
    pub radius: Option<Num>,
    pub bounds: Bounds,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<Num>,
    pub details: Fields,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            inputs: Fields::default(),
            value: None,
            radius: None,
            bounds: Bounds::default(),
            exact: None,
            residual: None,
            details: Fields::default(),
        }
    }

    pub fn enclosure(&mut self, value: f64, radius: f64) -> &mut Self {
        self.value = Some(Num(value));
        self.radius = Some(Num(radius));
        self
    }

    pub fn bounds(&mut self, remainder: f64, quadrature: f64) -> &mut Self {
        self.bounds = Bounds {
            remainder: Num(remainder),
            quadrature: Num(quadrature),
        };
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let line = |out: &mut String, k: &str, v: String| {
            let _ = writeln!(out, "{k:<24}{v}");
        };
        line(&mut out, "command", self.command.to_string());
        for (k, v) in &self.inputs.0 {
            line(&mut out, k, v.human());
        }
        if let (Some(v), Some(r)) = (self.value, self.radius) {
            line(&mut out, "value", human_num(v.0));
            line(&mut out, "radius", human_num(r.0));
            line(&mut out, "enclosure", format!("[{}, {}]", human_num(v.0 - r.0), human_num(v.0 + r.0)));
            line(&mut out, "remainder bound", human_num(self.bounds.remainder.0));
            line(&mut out, "quadrature radius", human_num(self.bounds.quadrature.0));
        }
        if let Some(e) = self.exact {
            line(&mut out, "exact", human_num(e.0));
        }
        if let Some(r) = self.residual {
            line(&mut out, "residual", human_num(r.0));
        }
        for (k, v) in &self.details.0 {
            line(&mut out, k, v.human());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_carry_seventeen_digits() {
        let s = serde_json::to_string(&Num(0.1)).unwrap();
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
        assert_eq!(serde_json::to_string(&Num(f64::INFINITY)).unwrap(), "null");
    }

    #[test]
    fn report_layout() {
        let mut r = Report::new("sum");
        r.inputs.push("a", 0i64).push("spec", "x.json");
        r.enclosure(1.5, 0.25).bounds(0.25, 0.0);
        r.exact = Some(Num(1.5));
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["command"], "sum");
        assert_eq!(v["inputs"]["a"], 0);
        assert_eq!(v["value"].as_f64(), Some(1.5));
        assert_eq!(v["bounds"]["remainder"].as_f64(), Some(0.25));
        assert!(v.get("residual").is_none());
        assert!(r.to_human().contains("enclosure               [1.25, 1.75]"));
    }
}
