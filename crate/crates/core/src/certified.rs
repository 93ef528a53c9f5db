use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::Serialize;

/// A value with a radius: the exact quantity lies in `[value - radius, value + radius]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Certified {
    pub value: f64,
    pub radius: f64,
}

impl Certified {
    pub fn new(value: f64, radius: f64) -> Self {
        debug_assert!(radius >= 0.0 && radius.is_finite(), "bad radius {radius}");
        Certified { value, radius }
    }

    pub fn exact(value: f64) -> Self {
        Certified { value, radius: 0.0 }
    }

    pub fn lower(&self) -> f64 {
        self.value - self.radius
    }

    pub fn upper(&self) -> f64 {
        self.value + self.radius
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.radius
    }

    /// `contains` with an extra absolute allowance for rounding in the caller's oracle.
    pub fn contains_within(&self, x: f64, slack: f64) -> bool {
        (x - self.value).abs() <= self.radius + slack
    }

    pub fn intersects(&self, other: &Certified) -> bool {
        (self.value - other.value).abs() <= self.radius + other.radius
    }

    pub fn widen(self, extra: f64) -> Self {
        Certified::new(self.value, self.radius + extra)
    }

    pub fn scale(self, k: f64) -> Self {
        Certified::new(k * self.value, k.abs() * self.radius)
    }
}

impl Add for Certified {
    type Output = Certified;
    fn add(self, rhs: Certified) -> Certified {
        Certified::new(self.value + rhs.value, self.radius + rhs.radius)
    }
}

impl Sub for Certified {
    type Output = Certified;
    fn sub(self, rhs: Certified) -> Certified {
        Certified::new(self.value - rhs.value, self.radius + rhs.radius)
    }
}

impl Add<f64> for Certified {
    type Output = Certified;
    fn add(self, rhs: f64) -> Certified {
        Certified::new(self.value + rhs, self.radius)
    }
}

impl Neg for Certified {
    type Output = Certified;
    fn neg(self) -> Certified {
        Certified::new(-self.value, self.radius)
    }
}

impl fmt::Display for Certified {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = f.precision() {
            write!(f, "{:.*} ± {:.3e}", p, self.value, self.radius)
        } else {
            write!(f, "{} ± {:e}", self.value, self.radius)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_adds_radii() {
        let a = Certified::new(1.0, 0.1);
        let b = Certified::new(2.0, 0.2);
        let s = a + b;
        assert_eq!(s.value, 3.0);
        assert!((s.radius - 0.3).abs() < 1e-15);
        let d = a - b;
        assert_eq!(d.value, -1.0);
        assert!((d.radius - 0.3).abs() < 1e-15);
        assert_eq!((-a).radius, 0.1);
        assert_eq!(a.scale(-2.0), Certified::new(-2.0, 0.2));
    }

    #[test]
    fn containment() {
        let c = Certified::new(0.5, 0.5);
        assert!(c.contains(0.5772156649));
        assert!(c.contains(0.0) && c.contains(1.0));
        assert!(!c.contains(1.0000001));
        assert!(c.intersects(&Certified::new(1.2, 0.2)));
        assert!(!c.intersects(&Certified::new(1.2, 0.1)));
    }
}
