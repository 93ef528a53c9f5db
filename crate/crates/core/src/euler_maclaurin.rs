//! First-order Euler-Maclaurin summation with pointwise-variation remainders.
//!
//! For integers `a < b` in the domain,
//!
//! ```text
//! sum_{a <= k < b} f(k) = ∫_a^b f - (f(b) - f(a)) / 2 + R,   |R| <= pV(f, [a, b]) / 2.
//! ```
//!
//! Sums over a half-line start at `k = 0`, so `0` must lie in the domain.

use serde::Serialize;

use crate::bv::{BvFunction, Interval};
use crate::certified::Certified;
use crate::error::{Error, Result};
use crate::measure::{integrate, stieltjes_beta1, stieltjes_midvalue, tail_integral, total_variation_measure, TailIntegral};
use crate::sum::NeumaierSum;

/// Slack added to every identity budget.
pub const IDENTITY_SLACK: f64 = 1e-9;
/// Slack for the combinatorial variation identity.
pub const PVV_SLACK: f64 = 1e-10;
/// Lower bound on the default reference index of [`asymptotic_sum`].
pub const GAMMA_REFERENCE_INDEX: i64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EmReport {
    pub exact_sum: Option<f64>,
    pub integral_term: Certified,
    /// `-(f(b) - f(a)) / 2`
    pub boundary_term: f64,
    /// `pV(f, [a, b]) / 2`
    pub remainder_bound: f64,
    pub approx: Certified,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaReport {
    pub n: i64,
    pub gamma_n: Certified,
    pub gamma_estimate: Certified,
    /// `pV(f, [n, inf)) / 2`
    pub remainder_bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Convergence {
    BothConverge,
    BothDiverge,
}

/// Outcome of a numerical identity check: `|lhs - rhs| <= budget`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: Certified,
    pub rhs: Certified,
    pub residual: f64,
    pub budget: f64,
}

impl IdentityCheck {
    fn new(lhs: Certified, rhs: Certified, slack: f64) -> Self {
        IdentityCheck {
            lhs,
            rhs,
            residual: (lhs.value - rhs.value).abs(),
            budget: lhs.radius + rhs.radius + slack,
        }
    }

    pub fn passed(&self) -> bool {
        self.residual <= self.budget
    }
}

fn check_order(a: i64, b: i64) -> Result<()> {
    if a < b {
        Ok(())
    } else {
        Err(Error::InvalidRange {
            lo: a as f64,
            hi: b as f64,
        })
    }
}

/// `sum_{a <= k < b} f(k)` with compensated summation.
pub fn direct_sum(f: &BvFunction, a: i64, b: i64) -> Result<f64> {
    let mut s = NeumaierSum::new();
    for k in a..b {
        s.add(f.eval(k as f64)?);
    }
    Ok(s.total())
}

/// `pV(f, [a, b]) / 2`. When `f` is monotone on `[a, b]` this equals
/// `|f(b) - f(a)| / 2`.
fn half_variation(f: &BvFunction, a: f64, b: f64) -> Result<f64> {
    let pv = f.pointwise_variation(Interval::closed(a, b))?;
    if b.is_finite() && f.monotone_direction_on(a, b)?.is_some() {
        let mono = (f.eval(b)? - f.eval(a)?).abs();
        debug_assert!((mono - pv).abs() <= 1e-12 * (1.0 + pv), "{mono} vs {pv}");
        return Ok(0.5 * mono);
    }
    Ok(0.5 * pv)
}

pub fn em_finite_sum(f: &BvFunction, a: i64, b: i64, tol: f64) -> Result<EmReport> {
    check_order(a, b)?;
    let (x, y) = (a as f64, b as f64);
    f.check_range(x, y)?;
    let integral_term = integrate(f, x, y, tol)?;
    let boundary_term = -0.5 * (f.eval(y)? - f.eval(x)?);
    let remainder_bound = half_variation(f, x, y)?;
    Ok(EmReport {
        exact_sum: Some(direct_sum(f, a, b)?),
        integral_term,
        boundary_term,
        remainder_bound,
        approx: (integral_term + boundary_term).widen(remainder_bound),
    })
}

/// `sum_{0 <= k < big_n} f(k)` from the first `n` terms:
/// `sum_{0 <= k < n} f(k) + ∫_n^N f - (f(N) - f(n)) / 2`.
pub fn approx_from_partial(f: &BvFunction, n: i64, big_n: i64, tol: f64) -> Result<Certified> {
    if n < 0 || n > big_n {
        return Err(Error::InvalidRange {
            lo: n as f64,
            hi: big_n as f64,
        });
    }
    let (x, y) = (n as f64, big_n as f64);
    f.check_range(0.0, y)?;
    let partial = direct_sum(f, 0, n)?;
    if n == big_n {
        return Ok(Certified::exact(partial));
    }
    let integral = integrate(f, x, y, tol)?;
    let boundary = -0.5 * (f.eval(y)? - f.eval(x)?);
    Ok((integral + partial + boundary).widen(half_variation(f, x, y)?))
}

/// `gamma_n = sum_{0 <= k < n} f(k) - ∫_0^n f`.
pub fn gamma_partial(f: &BvFunction, n: i64, tol: f64) -> Result<Certified> {
    if n < 0 {
        return Err(Error::InvalidRange {
            lo: 0.0,
            hi: n as f64,
        });
    }
    f.check_range(0.0, n as f64)?;
    if n == 0 {
        return Ok(Certified::exact(0.0));
    }
    let integral = integrate(f, 0.0, n as f64, tol)?;
    Ok(-integral + direct_sum(f, 0, n)?)
}

/// Enclosure of the Euler constant `gamma = lim gamma_n` of `f`:
/// `gamma_n - (f(inf) - f(n)) / 2` with radius `pV(f, [n, inf)) / 2`.
pub fn euler_constant(f: &BvFunction, n: i64, tol: f64) -> Result<GammaReport> {
    let limit = f.limit_at_infinity()?;
    let gamma_n = gamma_partial(f, n, tol)?;
    let x = n as f64;
    let remainder_bound = 0.5 * f.pointwise_variation(Interval::closed(x, f64::INFINITY))?;
    let estimate = (gamma_n + (-0.5 * (limit - f.eval(x)?))).widen(remainder_bound);
    Ok(GammaReport {
        n,
        gamma_n,
        gamma_estimate: estimate,
        remainder_bound,
    })
}

/// Integral test: the series and the improper integral share convergence.
pub fn classify_convergence(f: &BvFunction) -> Result<Convergence> {
    let tail = f.tail().ok_or(Error::NotHalfLine)?;
    if tail.limit_at_infinity() != 0.0 {
        return Ok(Convergence::BothDiverge);
    }
    let last = &f.pieces()[f.pieces().len() - 1];
    if last.left_limit() == 0.0 && last.right_limit() == 0.0 {
        return Ok(Convergence::BothConverge);
    }
    match tail.antiderivative_limit() {
        Some(l) if l.is_finite() => Ok(Convergence::BothConverge),
        Some(_) => Ok(Convergence::BothDiverge),
        None => Err(Error::MissingAntiderivative),
    }
}

/// `sum_{k >= 0} f(k) = sum_{0 <= k < n} f(k) + ∫_n^inf f - (f(inf) - f(n)) / 2 + eps`,
/// `|eps| <= pV(f, [n, inf)) / 2`.
pub fn series_sum(f: &BvFunction, n: i64, tol: f64) -> Result<Certified> {
    if classify_convergence(f)? == Convergence::BothDiverge {
        return Err(Error::SeriesDivergent);
    }
    if n < 0 {
        return Err(Error::InvalidRange {
            lo: 0.0,
            hi: n as f64,
        });
    }
    let x = n as f64;
    f.check_range(0.0, x)?;
    let tail = match tail_integral(f, x, tol)? {
        TailIntegral::Finite(c) => c,
        TailIntegral::Divergent => return Err(Error::SeriesDivergent),
    };
    let boundary = -0.5 * (f.limit_at_infinity()? - f.eval(x)?);
    let remainder = 0.5 * f.pointwise_variation(Interval::closed(x, f64::INFINITY))?;
    Ok((tail + direct_sum(f, 0, n)? + boundary).widen(remainder))
}

/// `sum_{0 <= k < n} f(k) = gamma + ∫_0^n f + eps'` with `|eps'| <= pV(f, [n, inf))`.
/// `gamma` is enclosed by [`euler_constant`] at `gamma_index`, by default
/// `max(n, 10^4)`.
pub fn asymptotic_sum(f: &BvFunction, n: i64, tol: f64, gamma_index: Option<i64>) -> Result<Certified> {
    if n < 0 {
        return Err(Error::InvalidRange {
            lo: 0.0,
            hi: n as f64,
        });
    }
    let x = n as f64;
    f.limit_at_infinity()?;
    f.check_range(0.0, x)?;
    let m = gamma_index.unwrap_or(n.max(GAMMA_REFERENCE_INDEX));
    let gamma = euler_constant(f, m, tol)?.gamma_estimate;
    let integral = integrate(f, 0.0, x, tol)?;
    let remainder = f.pointwise_variation(Interval::closed(x, f64::INFINITY))?;
    Ok((gamma + integral).widen(remainder))
}

/// For `f` monotone on `[0, n]`: `∫_0^n f` and the constant `|f(n) - f(0)|`
/// with `|sum_{0 <= k < n} f(k) - ∫_0^n f| <= |f(n) - f(0)|`.
pub fn asymptotic_unbounded_bound(f: &BvFunction, n: i64, tol: f64) -> Result<(Certified, f64)> {
    if n < 1 {
        return Err(Error::InvalidRange {
            lo: 1.0,
            hi: n as f64,
        });
    }
    let x = n as f64;
    f.check_range(0.0, x)?;
    if f.monotone_direction_on(0.0, x)?.is_none() {
        return Err(Error::NotMonotone { lo: 0.0, hi: x });
    }
    let value = integrate(f, 0.0, x, tol)?;
    Ok((value, (f.eval(x)? - f.eval(0.0)?).abs()))
}

/// Mid-value identity on `[a, b]`:
/// `sum_{a <= k < b} f_m(k) = ∫_a^b f - (f(b-) - f(a-)) / 2 + ∫_{]a,b[} beta1 dmu_f`.
pub fn em_midvalue_check(f: &BvFunction, a: i64, b: i64, tol: f64) -> Result<IdentityCheck> {
    check_order(a, b)?;
    let (x, y) = (a as f64, b as f64);
    f.check_range(x, y)?;
    let mut lhs = NeumaierSum::new();
    lhs.add(f.exterior_mid_value(x)?);
    for k in a + 1..b {
        lhs.add(f.mid_value(k as f64)?);
    }
    let integral = integrate(f, x, y, tol)?;
    let boundary = -0.5 * (f.exterior_left_limit(y)? - f.exterior_left_limit(x)?);
    let stieltjes = stieltjes_beta1(f, a, b, tol)?.certified;
    let rhs = integral + stieltjes + boundary;
    Ok(IdentityCheck::new(Certified::exact(lhs.total()), rhs, IDENTITY_SLACK))
}

/// Integration by parts on `[a, b[`:
/// `∫ g_m dmu_f + ∫ f_m dmu_g = g(b-) f(b-) - g(a-) f(a-)`.
pub fn parts_check(f: &BvFunction, g: &BvFunction, a: f64, b: f64, tol: f64) -> Result<IdentityCheck> {
    let half = 0.5 * tol;
    let gf = stieltjes_midvalue(g, f, a, b, half)?.certified;
    let fg = stieltjes_midvalue(f, g, a, b, half)?.certified;
    let at_b = g.exterior_left_limit(b)? * f.exterior_left_limit(b)?;
    let at_a = g.exterior_left_limit(a)? * f.exterior_left_limit(a)?;
    Ok(IdentityCheck::new(gf + fg, Certified::exact(at_b - at_a), IDENTITY_SLACK))
}

/// Components of the variation identity on `]lo, hi[`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VariationReport {
    pub pointwise_variation: f64,
    pub total_variation_measure: f64,
    pub rho_sum: f64,
    pub closed_variation: Option<f64>,
    /// `|f(lo) - f(lo+)|` and `|f(hi) - f(hi-)|`.
    pub endpoint_terms: (f64, f64),
}

impl VariationReport {
    /// `pV(]lo,hi[) = |mu_f|(]lo,hi[) + sum rho`.
    pub fn open_identity(&self) -> IdentityCheck {
        IdentityCheck::new(
            Certified::exact(self.pointwise_variation),
            Certified::exact(self.total_variation_measure + self.rho_sum),
            PVV_SLACK,
        )
    }
}

pub fn variation_report(f: &BvFunction, lo: f64, hi: f64) -> Result<VariationReport> {
    if !(lo < hi) {
        return Err(Error::InvalidRange { lo, hi });
    }
    let open = Interval::open(lo, hi);
    let closed = Interval::closed(lo, hi);
    let closed_variation = if hi.is_finite() {
        Some(f.pointwise_variation(closed)?)
    } else {
        None
    };
    Ok(VariationReport {
        pointwise_variation: f.pointwise_variation(open)?,
        total_variation_measure: total_variation_measure(f, lo, hi)?,
        rho_sum: f.rho_sum(lo, hi)?,
        closed_variation,
        endpoint_terms: f.endpoint_terms(closed)?,
    })
}

/// Combinatorial pointwise variation check: `pV(]lo,hi[) = |mu_f| + sum rho`.
pub fn pvv_check(f: &BvFunction, lo: f64, hi: f64) -> Result<IdentityCheck> {
    Ok(variation_report(f, lo, hi)?.open_identity())
}
