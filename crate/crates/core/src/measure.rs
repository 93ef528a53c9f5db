//! The Lebesgue-Stieltjes measure `mu_f`, certified quadrature and
//! Stieltjes integration.
//!
//! Quadrature on a monotone piece uses the piece antiderivative when one is
//! supplied (cross-checked against a coarse Darboux bracket) and Darboux
//! bracketing otherwise. Darboux sums on `n` uniform cells bracket the
//! integral with gap `(width / n) * |variation|`, so they converge slowly;
//! tight tolerances usually need an antiderivative.

use crate::bv::{BvFunction, Direction, Interval, MonotonePiece};
use crate::certified::Certified;
use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

pub type IntervalSpec = Interval;

/// Maximum number of cells per piece.
pub const DEFAULT_CAP: usize = 1 << 24;

const CHECK_CELLS: usize = 256;
const ROUNDING: f64 = 16.0 * f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    pub cap: usize,
    pub use_antiderivatives: bool,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            cap: DEFAULT_CAP,
            use_antiderivatives: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailIntegral {
    Finite(Certified),
    Divergent,
}

/// `∫ g dmu_f` split into its jump and continuous parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StieltjesResult {
    pub certified: Certified,
    pub atom_contribution: f64,
    pub continuous_contribution: Certified,
}

impl StieltjesResult {
    fn new(atoms: f64, continuous: Certified) -> Self {
        StieltjesResult {
            certified: Certified::new(atoms + continuous.value, continuous.radius),
            atom_contribution: atoms,
            continuous_contribution: continuous,
        }
    }
}

/// Signed measure of an interval from one-sided limits. Closed ends at the
/// domain boundary need exterior limits.
pub fn measure_interval(f: &BvFunction, iv: IntervalSpec) -> Result<f64> {
    f.check_range(iv.lo, iv.hi)?;
    if iv.lo == iv.hi {
        if !(iv.closed_lo && iv.closed_hi) {
            return Ok(0.0);
        }
        let l = f.exterior_left_limit(iv.lo)?;
        let r = f.exterior_right_limit(iv.lo)?;
        return Ok(r - l);
    }
    let start = if iv.closed_lo {
        f.exterior_left_limit(iv.lo)?
    } else {
        f.limits(iv.lo)?.2
    };
    let end = if iv.hi == f64::INFINITY {
        f.limit_at_infinity()?
    } else if iv.closed_hi {
        f.exterior_right_limit(iv.hi)?
    } else {
        f.limits(iv.hi)?.0
    };
    Ok(end - start)
}

/// `|mu_f|(]lo, hi[)`: piece variations plus jump magnitudes.
pub fn total_variation_measure(f: &BvFunction, lo: f64, hi: f64) -> Result<f64> {
    f.check_range(lo, hi)?;
    if lo == hi {
        return Ok(0.0);
    }
    let mut s = f.continuous_variation(lo, hi)?;
    for b in f.breakpoints_between(lo, hi) {
        s.add(b.jump().abs());
    }
    Ok(s.total())
}

/// Certified `∫_a^b f`.
pub fn integrate(f: &BvFunction, a: f64, b: f64, tol: f64) -> Result<Certified> {
    integrate_with(f, a, b, tol, &QuadratureOptions::default())
}

pub fn integrate_with(
    f: &BvFunction,
    a: f64,
    b: f64,
    tol: f64,
    opts: &QuadratureOptions,
) -> Result<Certified> {
    check_tol(tol, opts.cap)?;
    f.check_range(a, b)?;
    if !b.is_finite() {
        return Err(f.domain_error(b));
    }
    if a == b {
        return Ok(Certified::exact(0.0));
    }

    let mut exact = Vec::new();
    let mut darboux = Vec::new();
    for (i, p) in f.pieces_overlapping(a, b) {
        let (c, d) = (a.max(p.lo), b.min(p.hi));
        if is_flat(p) {
            exact.push(Certified::exact(p.left_limit * (d - c)));
            continue;
        }
        if opts.use_antiderivatives {
            if let Some(cert) = antiderivative_integral(i, p, c, d)? {
                exact.push(cert);
                continue;
            }
        }
        darboux.push((p, c, d));
    }

    let mut value = NeumaierSum::new();
    let mut radius = NeumaierSum::new();
    for c in &exact {
        value.add(c.value);
        radius.add(c.radius);
    }
    let remaining = tol - radius.total();
    if !darboux.is_empty() {
        if remaining <= 0.0 {
            return Err(Error::ToleranceUnreachable { tol, cap: opts.cap });
        }
        let weights: Vec<f64> = darboux
            .iter()
            .map(|&(p, c, d)| Ok((d - c) * (p.sample(d)? - p.sample(c)?).abs()))
            .collect::<Result<_>>()?;
        let total: f64 = weights.iter().sum();
        for (&(p, c, d), &w) in darboux.iter().zip(&weights) {
            let share = remaining * w / total;
            let cert = darboux_to_tol(p, c, d, w, share, tol, opts.cap)?;
            value.add(cert.value);
            radius.add(cert.radius);
        }
    }
    let r = radius.total();
    if r > tol {
        return Err(Error::ToleranceUnreachable { tol, cap: opts.cap });
    }
    Ok(Certified::new(value.total(), r))
}

fn check_tol(tol: f64, cap: usize) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::ToleranceUnreachable { tol, cap })
    }
}

fn is_flat(p: &MonotonePiece) -> bool {
    p.direction == Direction::Constant || p.left_limit == p.right_limit
}

/// `F(d) - F(c)`, or `None` when `F` cannot be evaluated at an end.
fn antiderivative_integral(index: usize, p: &MonotonePiece, c: f64, d: f64) -> Result<Option<Certified>> {
    let Some(f) = &p.antiderivative else {
        return Ok(None);
    };
    let (Ok(fc), Ok(fd)) = (f.eval(c), f.eval(d)) else {
        return Ok(None);
    };
    let cert = Certified::new(fd - fc, ROUNDING * (fc.abs() + fd.abs()));
    let (v, r) = darboux(p, c, d, CHECK_CELLS)?;
    if (cert.value - v).abs() > r + cert.radius + 1e-12 * (1.0 + v.abs()) {
        return Err(Error::BadAntiderivative {
            piece: index,
            lo: c,
            hi: d,
        });
    }
    Ok(Some(cert))
}

fn darboux_to_tol(
    p: &MonotonePiece,
    c: f64,
    d: f64,
    weight: f64,
    share: f64,
    tol: f64,
    cap: usize,
) -> Result<Certified> {
    let unreachable = Error::ToleranceUnreachable { tol, cap };
    let need = (weight / (1.8 * share)).ceil();
    if !(need <= cap as f64) {
        return Err(unreachable);
    }
    let mut n = (need as usize).max(1).next_power_of_two();
    loop {
        if n > cap {
            return Err(unreachable);
        }
        let (v, r) = darboux(p, c, d, n)?;
        if r <= share {
            return Ok(Certified::new(v, r));
        }
        n *= 2;
    }
}

/// Midpoint of the lower and upper Darboux sums on `n` uniform cells, and
/// half their gap plus a rounding allowance.
fn darboux(p: &MonotonePiece, c: f64, d: f64, n: usize) -> Result<(f64, f64)> {
    let w = d - c;
    let h = w / n as f64;
    let mut lower = NeumaierSum::new();
    let mut upper = NeumaierSum::new();
    let mut mass = 0.0;
    let mut prev = p.sample(c)?;
    for j in 1..=n {
        let t = if j == n { d } else { c + w * (j as f64 / n as f64) };
        let y = p.sample(t)?;
        lower.add(prev.min(y));
        upper.add(prev.max(y));
        mass += y.abs();
        prev = y;
    }
    let (l, u) = (h * lower.total(), h * upper.total());
    let rounding = ROUNDING * h * mass * (1.0 + (n as f64).log2());
    Ok((0.5 * (l + u), 0.5 * (u - l) + rounding))
}

/// `∫_n^inf f` on a half-line. Integrates up to the last piece first when
/// `n` lies before it.
pub fn tail_integral(f: &BvFunction, n: f64, tol: f64) -> Result<TailIntegral> {
    let tail = f.tail().ok_or(Error::NotHalfLine)?;
    f.check_point(n)?;
    let last = &f.pieces[f.pieces.len() - 1];
    let start = n.max(last.lo);
    let head = if n < last.lo {
        integrate(f, n, last.lo, tol)?
    } else {
        Certified::exact(0.0)
    };

    if is_flat(last) {
        return Ok(if last.left_limit == 0.0 {
            TailIntegral::Finite(head)
        } else {
            TailIntegral::Divergent
        });
    }
    let (Some(anti), Some(limit)) = (tail.antiderivative(), tail.antiderivative_limit()) else {
        return Err(Error::MissingAntiderivative);
    };
    if !limit.is_finite() {
        return Ok(TailIntegral::Divergent);
    }
    let at = anti.eval(start)?;
    let rest = Certified::new(limit - at, ROUNDING * (limit.abs() + at.abs()));
    Ok(TailIntegral::Finite(head + rest))
}

/// Periodic `B_1`: `x - floor(x) - 1/2` off the integers, `0` on them.
pub fn beta1(x: f64) -> f64 {
    let k = x.floor();
    if x == k {
        0.0
    } else {
        x - k - 0.5
    }
}

/// `∫_{]lo,hi[} beta1 dmu_f`.
///
/// On a piece with an antiderivative, each unit cell `(u, v)` inside
/// `(k, k+1)` is reduced exactly by parts to
/// `(v-k-1/2) f(v-) - (u-k-1/2) f(u+) - ∫_u^v f`. Other pieces use
/// Riemann-Stieltjes sums at cell midpoints, each cell contributing at most
/// `(width / 2) * |Δf|` since `beta1` is 1-Lipschitz inside a unit cell.
pub fn stieltjes_beta1(f: &BvFunction, lo: i64, hi: i64, tol: f64) -> Result<StieltjesResult> {
    stieltjes_beta1_with(f, lo, hi, tol, &QuadratureOptions::default())
}

pub fn stieltjes_beta1_with(
    f: &BvFunction,
    lo: i64,
    hi: i64,
    tol: f64,
    opts: &QuadratureOptions,
) -> Result<StieltjesResult> {
    check_tol(tol, opts.cap)?;
    let (a, b) = (lo as f64, hi as f64);
    if lo >= hi {
        return Err(Error::InvalidRange { lo: a, hi: b });
    }
    f.check_range(a, b)?;

    let mut atoms = NeumaierSum::new();
    for bp in f.breakpoints_between(a, b) {
        atoms.add(beta1(bp.x) * bp.jump());
    }

    let mut value = NeumaierSum::new();
    let mut radius = NeumaierSum::new();
    let mut cells = Vec::new();
    for (_, p) in f.pieces_overlapping(a, b) {
        let (c, d) = (a.max(p.lo), b.min(p.hi));
        if is_flat(p) {
            continue;
        }
        for (u, v) in unit_cells(c, d) {
            let by_parts = if opts.use_antiderivatives {
                beta1_by_parts(p, u, v)?
            } else {
                None
            };
            match by_parts {
                Some(cert) => {
                    value.add(cert.value);
                    radius.add(cert.radius);
                }
                None => cells.push((p, u, v, (p.sample(v)? - p.sample(u)?).abs())),
            }
        }
    }

    if !cells.is_empty() {
        let remaining = tol - radius.total();
        let variation: f64 = cells.iter().map(|c| c.3).sum();
        if remaining <= 0.0 {
            return Err(Error::ToleranceUnreachable { tol, cap: opts.cap });
        }
        if variation > 0.0 {
            let h = 2.0 * remaining / variation;
            for &(p, u, v, _) in &cells {
                let m = ((v - u) / h).ceil().max(1.0);
                if m > opts.cap as f64 {
                    return Err(Error::ToleranceUnreachable { tol, cap: opts.cap });
                }
                let (s, r) = beta1_cells(p, u, v, m as usize)?;
                value.add(s);
                radius.add(r);
            }
        }
    }
    let r = radius.total();
    if r > tol {
        return Err(Error::ToleranceUnreachable { tol, cap: opts.cap });
    }
    Ok(StieltjesResult::new(atoms.total(), Certified::new(value.total(), r)))
}

/// Splits `[c, d]` at the integers strictly inside it.
fn unit_cells(c: f64, d: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut u = c;
    let mut k = c.floor() + 1.0;
    while k < d {
        out.push((u, k));
        u = k;
        k += 1.0;
    }
    out.push((u, d));
    out
}

fn beta1_by_parts(p: &MonotonePiece, u: f64, v: f64) -> Result<Option<Certified>> {
    let Some(integral) = antiderivative_integral(0, p, u, v).map_err(|_| Error::BadAntiderivative {
        piece: 0,
        lo: u,
        hi: v,
    })?
    else {
        return Ok(None);
    };
    let k = u.floor();
    let (fu, fv) = (p.sample(u)?, p.sample(v)?);
    let (wu, wv) = (u - k - 0.5, v - k - 0.5);
    let boundary = wv * fv - wu * fu;
    let rounding = ROUNDING * (wv.abs() * fv.abs() + wu.abs() * fu.abs());
    Ok(Some(Certified::new(boundary - integral.value, integral.radius + rounding)))
}

fn beta1_cells(p: &MonotonePiece, u: f64, v: f64, m: usize) -> Result<(f64, f64)> {
    let k = u.floor();
    let w = v - u;
    let mut s = NeumaierSum::new();
    let mut r = NeumaierSum::new();
    let mut t0 = u;
    let mut y0 = p.sample(u)?;
    for j in 1..=m {
        let t1 = if j == m { v } else { u + w * (j as f64 / m as f64) };
        let y1 = p.sample(t1)?;
        let dy = y1 - y0;
        s.add((0.5 * (t0 + t1) - k - 0.5) * dy);
        r.add(0.5 * (t1 - t0) * dy.abs() + ROUNDING * dy.abs());
        t0 = t1;
        y0 = y1;
    }
    Ok((s.total(), r.total()))
}

/// `∫_{[lo,hi[} g_m dmu_f`.
///
/// Atoms are `g_m(x) * jump_f(x)` over breakpoints of `f` in `[lo, hi[`.
/// The continuous part is summed on the common refinement of both
/// functions' pieces; a cell contributes `(g_i + g_{i+1})/2 * Δf` with
/// error at most `|Δg| * |Δf| / 2`. Cells are refined until the total
/// error is within `tol`.
pub fn stieltjes_midvalue(g: &BvFunction, f: &BvFunction, lo: f64, hi: f64, tol: f64) -> Result<StieltjesResult> {
    stieltjes_midvalue_with(g, f, lo, hi, tol, DEFAULT_CAP)
}

pub fn stieltjes_midvalue_with(
    g: &BvFunction,
    f: &BvFunction,
    lo: f64,
    hi: f64,
    tol: f64,
    cap: usize,
) -> Result<StieltjesResult> {
    check_tol(tol, cap)?;
    if !(lo < hi) {
        return Err(Error::InvalidRange { lo, hi });
    }
    f.check_range(lo, hi)?;
    g.check_range(lo, hi)?;
    if !hi.is_finite() {
        return Err(f.domain_error(hi));
    }

    let mut atoms = NeumaierSum::new();
    let jump_lo = f.limits(lo)?.2 - f.exterior_left_limit(lo)?;
    if jump_lo != 0.0 {
        atoms.add(g.exterior_mid_value(lo)? * jump_lo);
    }
    for b in f.breakpoints_between(lo, hi) {
        if b.jump() != 0.0 {
            atoms.add(g.mid_value(b.x)? * b.jump());
        }
    }

    let mut cuts = vec![lo, hi];
    for h in [f, g] {
        for (_, p) in h.pieces_overlapping(lo, hi) {
            cuts.extend([p.lo, p.hi].into_iter().filter(|&x| lo < x && x < hi));
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut segments = Vec::new();
    for w in cuts.windows(2) {
        let (u, v) = (w[0], w[1]);
        let mid = 0.5 * (u + v);
        let fp = &f.pieces[f.piece_index(mid).expect("cut points include piece ends")];
        let gp = &g.pieces[g.piece_index(mid).expect("cut points include piece ends")];
        if is_flat(fp) {
            continue;
        }
        segments.push((fp, gp, u, v));
    }

    let mut n = 16usize;
    loop {
        let mut value = NeumaierSum::new();
        let mut radius = NeumaierSum::new();
        for &(fp, gp, u, v) in &segments {
            let cells = if is_flat(gp) { 1 } else { n };
            let (s, r) = product_cells(gp, fp, u, v, cells)?;
            value.add(s);
            radius.add(r);
        }
        let r = radius.total();
        if r <= tol {
            return Ok(StieltjesResult::new(atoms.total(), Certified::new(value.total(), r)));
        }
        let factor = (1.25 * r / tol).ceil();
        if n as f64 * factor > cap as f64 || n == cap {
            return Err(Error::ToleranceUnreachable { tol, cap });
        }
        n = (n * (factor as usize).next_power_of_two()).min(cap).max(2 * n);
    }
}

fn product_cells(gp: &MonotonePiece, fp: &MonotonePiece, u: f64, v: f64, m: usize) -> Result<(f64, f64)> {
    let w = v - u;
    let mut s = NeumaierSum::new();
    let mut r = NeumaierSum::new();
    let (mut g0, mut f0) = (gp.sample(u)?, fp.sample(u)?);
    for j in 1..=m {
        let t = if j == m { v } else { u + w * (j as f64 / m as f64) };
        let (g1, f1) = (gp.sample(t)?, fp.sample(t)?);
        let df = f1 - f0;
        s.add(0.5 * (g0 + g1) * df);
        r.add(0.5 * (g1 - g0).abs() * df.abs() + ROUNDING * (g0.abs() + g1.abs()) * df.abs());
        g0 = g1;
        f0 = f1;
    }
    Ok((s.total(), r.total()))
}
