//! Piecewise-monotone functions of bounded variation.
//!
//! A [`BvFunction`] lives on `[a, b]` or `[a, +inf)`. The domain is cut into
//! open intervals, each carrying a continuous monotone evaluator, and every
//! cut point carries a [`Breakpoint`] with the triple `(f(x-), f(x), f(x+))`.
//! Breakpoint data is authoritative: evaluating at a breakpoint never probes
//! an evaluator.
//!
//! Because every piece is monotone, the pointwise variation, the total
//! variation of the Lebesgue-Stieltjes measure and the Jordan decomposition
//! are all computed exactly from the piece boundary limits and the
//! breakpoint triples.
//!
//! Endpoint convention: at the left end `a` of the domain, `f(a-)` is
//! reported equal to `f(a)` unless a breakpoint at `a` supplies it (and
//! symmetrically at a finite right end). Operations that need a genuine
//! exterior limit use [`BvFunction::exterior_left_limit`], which fails with
//! [`Error::ExteriorLimitRequired`] instead of applying the convention.

mod validate;

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{BinOp, Expr};
use crate::sum::NeumaierSum;

pub use validate::{validate, FunctionSpec, PieceSpec, TailInput, CONSISTENCY_ABS, CONSISTENCY_REL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Increasing,
    Decreasing,
    Constant,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Increasing => "increasing",
            Direction::Decreasing => "decreasing",
            Direction::Constant => "constant",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Breakpoint {
    pub x: f64,
    /// `f(x-)`
    pub left: f64,
    /// `f(x)`
    pub value: f64,
    /// `f(x+)`
    pub right: f64,
}

impl Breakpoint {
    pub fn new(x: f64, left: f64, value: f64, right: f64) -> Self {
        Breakpoint {
            x,
            left,
            value,
            right,
        }
    }

    pub fn continuous(x: f64, value: f64) -> Self {
        Breakpoint::new(x, value, value, value)
    }

    /// The atom `mu_f({x})`.
    pub fn jump(&self) -> f64 {
        self.right - self.left
    }

    pub fn rho(&self) -> f64 {
        rho(self.left, self.value, self.right)
    }
}

/// Twice the distance from `at` to the interval spanned by `left` and `right`.
pub fn rho(left: f64, at: f64, right: f64) -> f64 {
    let r = (right - at).abs() + (at - left).abs() - (right - left).abs();
    r.max(0.0)
}

/// A continuous monotone segment on the open interval `(lo, hi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotonePiece {
    pub(crate) lo: f64,
    pub(crate) hi: f64,
    pub(crate) evaluator: Expr,
    pub(crate) direction: Direction,
    pub(crate) left_limit: f64,
    pub(crate) right_limit: f64,
    pub(crate) antiderivative: Option<Expr>,
}

impl MonotonePiece {
    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn evaluator(&self) -> &Expr {
        &self.evaluator
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// `f(lo+)`
    pub fn left_limit(&self) -> f64 {
        self.left_limit
    }

    /// `f(hi-)`, or `f(inf)` on an unbounded piece.
    pub fn right_limit(&self) -> f64 {
        self.right_limit
    }

    pub fn antiderivative(&self) -> Option<&Expr> {
        self.antiderivative.as_ref()
    }

    /// `|f(hi-) - f(lo+)|`
    pub fn variation(&self) -> f64 {
        (self.right_limit - self.left_limit).abs()
    }

    /// Value on the closure of the piece, using the boundary limits at the ends.
    pub fn sample(&self, t: f64) -> Result<f64> {
        if t <= self.lo {
            Ok(self.left_limit)
        } else if t >= self.hi {
            Ok(self.right_limit)
        } else if self.direction == Direction::Constant {
            Ok(self.left_limit)
        } else {
            Ok(self.evaluator.eval(t)?)
        }
    }

    fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

/// Behavior at `+inf` for half-line domains.
#[derive(Clone, Debug, PartialEq)]
pub struct TailSpec {
    pub(crate) limit_at_infinity: f64,
    pub(crate) antiderivative: Option<Expr>,
    pub(crate) antiderivative_limit: Option<f64>,
}

impl TailSpec {
    pub fn limit_at_infinity(&self) -> f64 {
        self.limit_at_infinity
    }

    pub fn antiderivative(&self) -> Option<&Expr> {
        self.antiderivative.as_ref()
    }

    /// Finite, `+inf` or `-inf`.
    pub fn antiderivative_limit(&self) -> Option<f64> {
        self.antiderivative_limit
    }
}

/// An interval with independent endpoint closure flags. `hi` may be `+inf`,
/// in which case `closed_hi` is ignored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub closed_lo: bool,
    pub closed_hi: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, closed_lo: bool, closed_hi: bool) -> Self {
        Interval {
            lo,
            hi,
            closed_lo,
            closed_hi,
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval::new(lo, hi, true, true)
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Interval::new(lo, hi, false, false)
    }

    pub fn closed_open(lo: f64, hi: f64) -> Self {
        Interval::new(lo, hi, true, false)
    }

    pub fn open_closed(lo: f64, hi: f64) -> Self {
        Interval::new(lo, hi, false, true)
    }

    pub fn point(x: f64) -> Self {
        Interval::closed(x, x)
    }

    pub fn is_open(&self) -> bool {
        !self.closed_lo && (!self.closed_hi || self.hi == f64::INFINITY)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.closed_lo { '[' } else { ']' };
        let r = if self.closed_hi && self.hi.is_finite() {
            ']'
        } else {
            '['
        };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// A validated piecewise-monotone BV function. Immutable.
#[derive(Clone, Debug, PartialEq)]
pub struct BvFunction {
    pub(crate) name: String,
    pub(crate) lo: f64,
    pub(crate) hi: f64,
    pub(crate) pieces: Vec<MonotonePiece>,
    pub(crate) breakpoints: Vec<Breakpoint>,
    pub(crate) tail: Option<TailSpec>,
}

impl BvFunction {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// `(a, b)`; `b` is `+inf` for a half-line.
    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn is_half_line(&self) -> bool {
        self.hi == f64::INFINITY
    }

    pub fn pieces(&self) -> &[MonotonePiece] {
        &self.pieces
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    pub fn tail(&self) -> Option<&TailSpec> {
        self.tail.as_ref()
    }

    pub(crate) fn check_point(&self, x: f64) -> Result<()> {
        if x >= self.lo && x <= self.hi && !x.is_nan() && x.is_finite() {
            Ok(())
        } else {
            Err(self.domain_error(x))
        }
    }

    pub(crate) fn domain_error(&self, x: f64) -> Error {
        Error::Domain {
            x,
            lo: self.lo,
            hi: self.hi,
        }
    }

    /// Checks `lo <= hi` and `[lo, hi]` within the domain; `hi` may be `+inf`
    /// on a half-line.
    pub(crate) fn check_range(&self, lo: f64, hi: f64) -> Result<()> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidRange { lo, hi });
        }
        self.check_point(lo)?;
        if hi == f64::INFINITY && self.is_half_line() {
            return Ok(());
        }
        self.check_point(hi)
    }

    pub fn breakpoint_at(&self, x: f64) -> Option<&Breakpoint> {
        self.breakpoints
            .binary_search_by(|b| b.x.total_cmp(&x))
            .ok()
            .map(|i| &self.breakpoints[i])
    }

    /// Index of the piece whose open interval contains `x`.
    pub(crate) fn piece_index(&self, x: f64) -> Option<usize> {
        let i = self.pieces.partition_point(|p| p.lo < x);
        if i == 0 {
            return None;
        }
        self.pieces[i - 1].contains(x).then_some(i - 1)
    }

    /// Breakpoints with `lo < x < hi`.
    pub(crate) fn breakpoints_between(&self, lo: f64, hi: f64) -> &[Breakpoint] {
        let start = self.breakpoints.partition_point(|b| b.x <= lo);
        let end = self.breakpoints.partition_point(|b| b.x < hi);
        if start >= end {
            &[]
        } else {
            &self.breakpoints[start..end]
        }
    }

    /// Pieces whose open interval meets `(lo, hi)`.
    pub(crate) fn pieces_overlapping(&self, lo: f64, hi: f64) -> impl Iterator<Item = (usize, &MonotonePiece)> {
        let start = self.pieces.partition_point(|p| p.hi <= lo);
        self.pieces[start..]
            .iter()
            .enumerate()
            .map(move |(k, p)| (start + k, p))
            .take_while(move |(_, p)| p.lo < hi)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.check_point(x)?;
        if let Some(b) = self.breakpoint_at(x) {
            return Ok(b.value);
        }
        match self.piece_index(x) {
            Some(i) => self.pieces[i].sample(x),
            None => Ok(self.endpoint_value(x)),
        }
    }

    /// Value at a domain endpoint that carries no breakpoint.
    fn endpoint_value(&self, x: f64) -> f64 {
        if x == self.lo {
            self.pieces[0].left_limit
        } else {
            self.pieces[self.pieces.len() - 1].right_limit
        }
    }

    /// `(f(x-), f(x), f(x+))`.
    pub fn limits(&self, x: f64) -> Result<(f64, f64, f64)> {
        self.check_point(x)?;
        if let Some(b) = self.breakpoint_at(x) {
            return Ok((b.left, b.value, b.right));
        }
        let v = match self.piece_index(x) {
            Some(i) => self.pieces[i].sample(x)?,
            None => self.endpoint_value(x),
        };
        Ok((v, v, v))
    }

    /// `f(x-)` without the endpoint convention.
    pub fn exterior_left_limit(&self, x: f64) -> Result<f64> {
        self.check_point(x)?;
        if x == self.lo && self.breakpoint_at(x).is_none() {
            return Err(Error::ExteriorLimitRequired { x });
        }
        Ok(self.limits(x)?.0)
    }

    /// `f(x+)` without the endpoint convention.
    pub fn exterior_right_limit(&self, x: f64) -> Result<f64> {
        self.check_point(x)?;
        if x == self.hi && self.breakpoint_at(x).is_none() {
            return Err(Error::ExteriorLimitRequired { x });
        }
        Ok(self.limits(x)?.2)
    }

    /// The mid-value modification `(f(x-) + f(x+)) / 2`.
    pub fn mid_value(&self, x: f64) -> Result<f64> {
        let (l, _, r) = self.limits(x)?;
        Ok(0.5 * (l + r))
    }

    /// Mid-value with genuine exterior limits at the domain ends.
    pub fn exterior_mid_value(&self, x: f64) -> Result<f64> {
        let l = self.exterior_left_limit(x)?;
        let r = self.exterior_right_limit(x)?;
        Ok(0.5 * (l + r))
    }

    pub fn rho(&self, x: f64) -> Result<f64> {
        let (l, v, r) = self.limits(x)?;
        Ok(rho(l, v, r))
    }

    /// `f(inf)` on a half-line.
    pub fn limit_at_infinity(&self) -> Result<f64> {
        match &self.tail {
            Some(t) => Ok(t.limit_at_infinity),
            None => Err(Error::NotHalfLine),
        }
    }

    /// Pointwise variation: the supremum of `sum |f(t_{i+1}) - f(t_i)|` over
    /// samples in the interval. Exact for piecewise-monotone functions.
    pub fn pointwise_variation(&self, iv: Interval) -> Result<f64> {
        self.check_range(iv.lo, iv.hi)?;
        if iv.lo == iv.hi {
            return Ok(0.0);
        }
        let mut s = self.continuous_variation(iv.lo, iv.hi)?;
        for b in self.breakpoints_between(iv.lo, iv.hi) {
            s.add((b.value - b.left).abs() + (b.right - b.value).abs());
        }
        let (lo_term, hi_term) = self.endpoint_terms(iv)?;
        s.add(lo_term);
        s.add(hi_term);
        Ok(s.total())
    }

    /// `|f(lo) - f(lo+)|` and `|f(hi) - f(hi-)|`, each zero when that end is open.
    pub fn endpoint_terms(&self, iv: Interval) -> Result<(f64, f64)> {
        let lo_term = if iv.closed_lo {
            let (_, v, r) = self.limits(iv.lo)?;
            (v - r).abs()
        } else {
            0.0
        };
        let hi_term = if iv.closed_hi && iv.hi.is_finite() {
            let (l, v, _) = self.limits(iv.hi)?;
            (v - l).abs()
        } else {
            0.0
        };
        Ok((lo_term, hi_term))
    }

    /// Sum of `|rho_f(x)|` over breakpoints strictly inside `(lo, hi)`.
    pub fn rho_sum(&self, lo: f64, hi: f64) -> Result<f64> {
        self.check_range(lo, hi)?;
        Ok(self
            .breakpoints_between(lo, hi)
            .iter()
            .map(Breakpoint::rho)
            .collect::<NeumaierSum>()
            .total())
    }

    /// Sum over pieces of the variation on `(lo, hi)`.
    pub(crate) fn continuous_variation(&self, lo: f64, hi: f64) -> Result<NeumaierSum> {
        let mut s = NeumaierSum::new();
        for (_, p) in self.pieces_overlapping(lo, hi) {
            let a = lo.max(p.lo);
            let b = hi.min(p.hi);
            let ya = p.sample(a)?;
            let yb = p.sample(b)?;
            s.add((yb - ya).abs());
        }
        Ok(s)
    }

    /// Common direction of every piece and jump on `[lo, hi]`, if any.
    /// Constant stretches are compatible with either direction.
    pub fn monotone_direction_on(&self, lo: f64, hi: f64) -> Result<Option<Direction>> {
        self.check_range(lo, hi)?;
        let mut dir = Direction::Constant;
        let mut merge = |d: Direction| -> bool {
            match (dir, d) {
                (_, Direction::Constant) => true,
                (Direction::Constant, d) => {
                    dir = d;
                    true
                }
                (a, b) => a == b,
            }
        };
        let step = |from: f64, to: f64| {
            if to > from {
                Direction::Increasing
            } else if to < from {
                Direction::Decreasing
            } else {
                Direction::Constant
            }
        };
        for (_, p) in self.pieces_overlapping(lo, hi) {
            let d = if p.direction == Direction::Constant || p.left_limit == p.right_limit {
                Direction::Constant
            } else {
                p.direction
            };
            if !merge(d) {
                return Ok(None);
            }
        }
        for b in self.breakpoints_between(lo, hi) {
            if !merge(step(b.left, b.value)) || !merge(step(b.value, b.right)) {
                return Ok(None);
            }
        }
        let (_, v, r) = self.limits(lo)?;
        if !merge(step(v, r)) {
            return Ok(None);
        }
        if hi.is_finite() {
            let (l, v, _) = self.limits(hi)?;
            if !merge(step(l, v)) {
                return Ok(None);
            }
        }
        Ok(Some(dir))
    }

    /// Jordan decomposition `f = f1 - f2` with `f1`, `f2` nondecreasing and
    /// `pV(f) = pV(f1) + pV(f2)`. `f1` starts at `f(a)` and `f2` at `0`.
    pub fn jordan_decompose(&self) -> (BvFunction, BvFunction) {
        let mut pos = JordanSweep::new(format!("{}.f1", self.name));
        let mut neg = JordanSweep::new(format!("{}.f2", self.name));
        let start = self
            .breakpoint_at(self.lo)
            .map(|b| b.value)
            .unwrap_or(self.pieces[0].left_limit);
        pos.level = start;
        neg.level = 0.0;

        if let Some(b) = self.breakpoint_at(self.lo) {
            // f1(a) = f(a) and f2(a) = 0; the exterior limit sits below.
            let (p_in, n_in) = ((b.value - b.left).max(0.0), (b.left - b.value).max(0.0));
            pos.level -= p_in;
            neg.level -= n_in;
            cross(b, &mut pos, &mut neg);
        }

        for p in &self.pieces {
            let (l, r) = (p.left_limit, p.right_limit);
            match p.direction {
                Direction::Increasing if l != r => {
                    let shift = pos.level - l;
                    pos.piece_from(p, p.evaluator.clone().shifted(shift), r - l, p.antiderivative.clone().map(|f| linear_plus(shift, f)));
                    neg.flat_piece(p);
                }
                Direction::Decreasing if l != r => {
                    let offset = neg.level + l;
                    pos.flat_piece(p);
                    neg.piece_from(p, p.evaluator.clone().reflected(offset), l - r, p.antiderivative.clone().map(|f| linear_minus(offset, f)));
                }
                _ => {
                    pos.flat_piece(p);
                    neg.flat_piece(p);
                }
            }
            if p.hi.is_finite() {
                if let Some(b) = self.breakpoint_at(p.hi) {
                    cross(b, &mut pos, &mut neg);
                }
            }
        }

        let finish = |s: JordanSweep| BvFunction {
            name: s.name,
            lo: self.lo,
            hi: self.hi,
            tail: self.tail.as_ref().map(|_| TailSpec {
                limit_at_infinity: s.pieces[s.pieces.len() - 1].right_limit,
                antiderivative: None,
                antiderivative_limit: None,
            }),
            pieces: s.pieces,
            breakpoints: s.breakpoints,
        };
        (finish(pos), finish(neg))
    }
}

fn cross(b: &Breakpoint, pos: &mut JordanSweep, neg: &mut JordanSweep) {
    let (l, v, r) = (b.left, b.value, b.right);
    pos.cross(b.x, (v - l).max(0.0), (r - v).max(0.0));
    neg.cross(b.x, (l - v).max(0.0), (v - r).max(0.0));
}

/// `k * x + F`
fn linear_plus(k: f64, f: Expr) -> Expr {
    if k == 0.0 {
        return f;
    }
    Expr::bin(BinOp::Add, Expr::bin(BinOp::Mul, Expr::num(k), Expr::Var), f)
}

/// `k * x - F`
fn linear_minus(k: f64, f: Expr) -> Expr {
    Expr::bin(BinOp::Sub, Expr::bin(BinOp::Mul, Expr::num(k), Expr::Var), f)
}

struct JordanSweep {
    name: String,
    level: f64,
    pieces: Vec<MonotonePiece>,
    breakpoints: Vec<Breakpoint>,
}

impl JordanSweep {
    fn new(name: String) -> Self {
        JordanSweep {
            name,
            level: 0.0,
            pieces: Vec::new(),
            breakpoints: Vec::new(),
        }
    }

    fn cross(&mut self, x: f64, up_in: f64, up_out: f64) {
        let left = self.level;
        let value = left + up_in;
        let right = value + up_out;
        self.breakpoints.push(Breakpoint::new(x, left, value, right));
        self.level = right;
    }

    fn piece_from(&mut self, p: &MonotonePiece, evaluator: Expr, rise: f64, antiderivative: Option<Expr>) {
        let left = self.level;
        let right = left + rise;
        self.pieces.push(MonotonePiece {
            lo: p.lo,
            hi: p.hi,
            evaluator,
            direction: Direction::Increasing,
            left_limit: left,
            right_limit: right,
            antiderivative,
        });
        self.level = right;
    }

    fn flat_piece(&mut self, p: &MonotonePiece) {
        let c = self.level;
        self.pieces.push(MonotonePiece {
            lo: p.lo,
            hi: p.hi,
            evaluator: Expr::num(c),
            direction: Direction::Constant,
            left_limit: c,
            right_limit: c,
            antiderivative: Some(linear_plus(c, Expr::Num(0.0))),
        });
    }
}

#[cfg(test)]
mod tests;
