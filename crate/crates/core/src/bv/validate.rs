//! Builds a [`BvFunction`] from an unchecked description.
//!
//! Monotonicity and limit agreement are checked by sampling: 1025
//! equispaced interior points per piece plus 64 points approaching each end
//! geometrically. This is a falsification check on black-box evaluators,
//! not a proof.

use super::{Breakpoint, BvFunction, Direction, MonotonePiece, TailSpec};
use crate::error::{Error, Result, Violation};
use crate::expr::{parse, Expr};

pub const CONSISTENCY_REL: f64 = 1e-6;
pub const CONSISTENCY_ABS: f64 = 1e-9;

const EQUISPACED: usize = 1025;
const APPROACH: i32 = 64;
const ANTIDERIVATIVE_PROBES: usize = 32;
const ANTIDERIVATIVE_REL: f64 = 1e-4;

/// Unchecked description of a function, as read from a spec file.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionSpec {
    pub name: String,
    pub lo: f64,
    /// `+inf` for a half-line.
    pub hi: f64,
    pub pieces: Vec<PieceSpec>,
    pub breakpoints: Vec<Breakpoint>,
    pub tail: Option<TailInput>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PieceSpec {
    pub lo: f64,
    pub hi: f64,
    pub expr: String,
    pub direction: Direction,
    pub left_limit: f64,
    pub right_limit: f64,
    pub antiderivative: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailInput {
    pub limit: f64,
    pub antiderivative: Option<String>,
    /// Finite or infinite.
    pub antiderivative_limit: Option<f64>,
}

pub(crate) fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= CONSISTENCY_ABS + CONSISTENCY_REL * a.abs().max(b.abs())
}

fn piece_loc(i: usize) -> String {
    format!("pieces[{i}]")
}

fn bp_loc(i: usize) -> String {
    format!("breakpoints[{i}]")
}

/// Validates `spec`, returning every violation found.
pub fn validate(spec: &FunctionSpec) -> Result<BvFunction> {
    let mut v = Vec::new();
    check_partition(spec, &mut v);
    if !v.is_empty() {
        return Err(Error::Invalid(v));
    }

    let mut pieces = Vec::with_capacity(spec.pieces.len());
    for (i, p) in spec.pieces.iter().enumerate() {
        let evaluator = parse_field(&p.expr, format!("{}.expr", piece_loc(i)), &mut v);
        let antiderivative = p
            .antiderivative
            .as_deref()
            .and_then(|s| parse_field(s, format!("{}.antiderivative", piece_loc(i)), &mut v));
        pieces.push(MonotonePiece {
            lo: p.lo,
            hi: p.hi,
            evaluator: evaluator.unwrap_or(Expr::Num(0.0)),
            direction: p.direction,
            left_limit: p.left_limit,
            right_limit: p.right_limit,
            antiderivative,
        });
    }
    let tail = match &spec.tail {
        Some(t) if spec.hi == f64::INFINITY => {
            let antiderivative = t
                .antiderivative
                .as_deref()
                .and_then(|s| parse_field(s, "tail.antiderivative".into(), &mut v));
            if antiderivative.is_some() && t.antiderivative_limit.is_none() {
                v.push(Violation::BadPartition {
                    location: "tail".into(),
                    reason: "antiderivative given without antiderivative_limit".into(),
                });
            }
            Some(TailSpec {
                limit_at_infinity: t.limit,
                antiderivative,
                antiderivative_limit: t.antiderivative_limit,
            })
        }
        _ => None,
    };
    if !v.is_empty() {
        return Err(Error::Invalid(v));
    }

    let breakpoints = reconcile_breakpoints(spec, &mut pieces, &mut v);

    if let (Some(t), Some(last)) = (&tail, pieces.last_mut()) {
        if !close(last.right_limit, t.limit_at_infinity) {
            v.push(Violation::InconsistentLimits {
                location: "tail.limit".into(),
                declared: t.limit_at_infinity,
                found: last.right_limit,
            });
        }
        last.right_limit = t.limit_at_infinity;
        if last.antiderivative.is_none() {
            last.antiderivative = t.antiderivative.clone();
        }
    }

    for (i, p) in pieces.iter().enumerate() {
        check_piece(i, p, &mut v);
    }
    if let Some(t) = &tail {
        check_tail_antiderivative(pieces.last().expect("nonempty"), t, &mut v);
    }

    if !v.is_empty() {
        return Err(Error::Invalid(v));
    }
    Ok(BvFunction {
        name: spec.name.clone(),
        lo: spec.lo,
        hi: spec.hi,
        pieces,
        breakpoints,
        tail,
    })
}

fn parse_field(text: &str, location: String, v: &mut Vec<Violation>) -> Option<Expr> {
    match parse(text) {
        Ok(e) => Some(e),
        Err(error) => {
            v.push(Violation::BadExpression { location, error });
            None
        }
    }
}

fn check_partition(spec: &FunctionSpec, v: &mut Vec<Violation>) {
    let bad = |location: String, reason: String| Violation::BadPartition { location, reason };
    if !spec.lo.is_finite() || spec.hi.is_nan() || spec.hi == f64::NEG_INFINITY || spec.hi <= spec.lo {
        v.push(bad("domain".into(), format!("invalid domain [{}, {}]", spec.lo, spec.hi)));
        return;
    }
    if spec.pieces.is_empty() {
        v.push(bad("pieces".into(), "no pieces".into()));
        return;
    }
    let mut expected = spec.lo;
    for (i, p) in spec.pieces.iter().enumerate() {
        if p.lo != expected {
            let reason = if p.lo < expected {
                format!("starts at {} but overlaps the previous piece ending at {expected}", p.lo)
            } else {
                format!("starts at {} leaving a gap after {expected}", p.lo)
            };
            v.push(bad(piece_loc(i), reason));
        }
        if p.lo.is_nan() || p.hi.is_nan() || p.hi <= p.lo {
            v.push(bad(piece_loc(i), format!("empty interval ({}, {})", p.lo, p.hi)));
        }
        if p.hi == f64::INFINITY && i + 1 != spec.pieces.len() {
            v.push(bad(piece_loc(i), "only the last piece may be unbounded".into()));
        }
        for (what, x) in [("left_limit", p.left_limit), ("right_limit", p.right_limit)] {
            if !x.is_finite() {
                v.push(bad(piece_loc(i), format!("{what} is not finite")));
            }
        }
        expected = p.hi;
    }
    if expected != spec.hi {
        v.push(bad(
            "pieces".into(),
            format!("pieces end at {expected} but the domain ends at {}", spec.hi),
        ));
    }

    let half_line = spec.hi == f64::INFINITY;
    match (&spec.tail, half_line) {
        (None, true) => v.push(Violation::MissingTail),
        (Some(_), false) => v.push(bad("tail".into(), "tail given for a compact domain".into())),
        (Some(t), true) if !t.limit.is_finite() => {
            v.push(bad("tail.limit".into(), "limit at infinity must be finite".into()))
        }
        _ => {}
    }

    let cuts: Vec<f64> = std::iter::once(spec.lo)
        .chain(spec.pieces.iter().map(|p| p.hi))
        .filter(|x| x.is_finite())
        .collect();
    let mut prev = f64::NEG_INFINITY;
    for (i, b) in spec.breakpoints.iter().enumerate() {
        if !(b.x > prev) {
            v.push(bad(bp_loc(i), "breakpoints must be strictly increasing".into()));
        }
        prev = b.x;
        if ![b.left, b.value, b.right].iter().all(|x| x.is_finite()) {
            v.push(bad(bp_loc(i), "breakpoint values must be finite".into()));
        }
        if !cuts.contains(&b.x) {
            v.push(bad(
                bp_loc(i),
                format!("x = {} is not a piece boundary or domain end", b.x),
            ));
        }
    }
}

/// Ensures every junction has a breakpoint and snaps piece boundary limits
/// to the (authoritative) breakpoint triples.
fn reconcile_breakpoints(
    spec: &FunctionSpec,
    pieces: &mut [MonotonePiece],
    v: &mut Vec<Violation>,
) -> Vec<Breakpoint> {
    let mut out = Vec::new();
    let find = |x: f64| spec.breakpoints.iter().position(|b| b.x == x);

    if let Some(i) = find(spec.lo) {
        let b = spec.breakpoints[i];
        if !close(b.right, pieces[0].left_limit) {
            v.push(Violation::InconsistentLimits {
                location: format!("{}.right", bp_loc(i)),
                declared: b.right,
                found: pieces[0].left_limit,
            });
        }
        pieces[0].left_limit = b.right;
        out.push(b);
    }

    for k in 0..pieces.len().saturating_sub(1) {
        let x = pieces[k].hi;
        let (before, after) = (pieces[k].right_limit, pieces[k + 1].left_limit);
        match find(x) {
            Some(i) => {
                let b = spec.breakpoints[i];
                if !close(b.left, before) {
                    v.push(Violation::InconsistentLimits {
                        location: format!("{}.left", bp_loc(i)),
                        declared: b.left,
                        found: before,
                    });
                }
                if !close(b.right, after) {
                    v.push(Violation::InconsistentLimits {
                        location: format!("{}.right", bp_loc(i)),
                        declared: b.right,
                        found: after,
                    });
                }
                pieces[k].right_limit = b.left;
                pieces[k + 1].left_limit = b.right;
                out.push(b);
            }
            None => {
                if !close(before, after) {
                    v.push(Violation::InconsistentLimits {
                        location: format!("{}.left_limit", piece_loc(k + 1)),
                        declared: after,
                        found: before,
                    });
                }
                pieces[k + 1].left_limit = before;
                out.push(Breakpoint::continuous(x, before));
            }
        }
    }

    if spec.hi.is_finite() {
        if let Some(i) = find(spec.hi) {
            let b = spec.breakpoints[i];
            let last = pieces.len() - 1;
            if !close(b.left, pieces[last].right_limit) {
                v.push(Violation::InconsistentLimits {
                    location: format!("{}.left", bp_loc(i)),
                    declared: b.left,
                    found: pieces[last].right_limit,
                });
            }
            pieces[last].right_limit = b.left;
            out.push(b);
        }
    }
    out
}

/// Interior sample points of a piece, ascending, with the approach
/// sequences toward each end returned separately (nearest point last).
struct Samples {
    interior: Vec<f64>,
    toward_lo: Vec<f64>,
    toward_hi: Vec<f64>,
}

fn scale_of(p: &MonotonePiece) -> f64 {
    p.lo.abs().max(1.0)
}

fn samples(p: &MonotonePiece) -> Samples {
    let (lo, hi) = (p.lo, p.hi);
    let inside = |t: f64| t > lo && t < hi;
    let mut interior = Vec::with_capacity(EQUISPACED + 2 * APPROACH as usize);
    let mut toward_lo = Vec::new();
    let mut toward_hi = Vec::new();
    if hi.is_finite() {
        let w = hi - lo;
        for i in 1..=EQUISPACED {
            interior.push(lo + w * i as f64 / (EQUISPACED + 1) as f64);
        }
        for k in 1..=APPROACH {
            let d = w * 0.5f64.powi(k);
            let (a, b) = (lo + d, hi - d);
            if inside(a) {
                toward_lo.push(a);
            }
            if inside(b) {
                toward_hi.push(b);
            }
        }
    } else {
        let s = scale_of(p);
        for i in 1..=EQUISPACED {
            let u = i as f64 / (EQUISPACED + 1) as f64;
            interior.push(lo + s * u / (1.0 - u));
        }
        for k in 1..=APPROACH {
            let a = lo + s * 0.5f64.powi(k);
            if inside(a) {
                toward_lo.push(a);
            }
            toward_hi.push(lo + s * 2f64.powi(k));
        }
    }
    interior.extend(toward_lo.iter().copied());
    interior.extend(toward_hi.iter().copied());
    interior.retain(|t| inside(*t));
    interior.sort_by(f64::total_cmp);
    interior.dedup();
    Samples {
        interior,
        toward_lo,
        toward_hi,
    }
}

/// Accepts a declared limit when the nearest probe is within tolerance, or
/// when the probes are still visibly converging and the gap is a small
/// multiple of the last step (slow limits such as `sqrt` at 0).
fn limit_consistent(declared: f64, probes: &[f64]) -> bool {
    match probes {
        [] => true,
        [.., last] if close(*last, declared) => true,
        [.., prev, last] => (last - declared).abs() <= 16.0 * (last - prev).abs(),
        _ => false,
    }
}

fn check_piece(i: usize, p: &MonotonePiece, v: &mut Vec<Violation>) {
    let loc = piece_loc(i);
    let (l, r) = (p.left_limit, p.right_limit);
    let ordered = match p.direction {
        Direction::Increasing => l <= r || close(l, r),
        Direction::Decreasing => l >= r || close(l, r),
        Direction::Constant => close(l, r),
    };
    if !ordered {
        v.push(Violation::NonMonotonePiece {
            location: loc.clone(),
            direction: p.direction,
            at: p.lo,
        });
        return;
    }

    let s = samples(p);
    let eval_all = |ts: &[f64]| -> std::result::Result<Vec<f64>, Violation> {
        ts.iter()
            .map(|&t| {
                p.evaluator.eval(t).map_err(|error| Violation::EvaluationFailed {
                    location: format!("{loc}.expr"),
                    error,
                })
            })
            .collect()
    };
    let (ys, lo_probe, hi_probe) = match (eval_all(&s.interior), eval_all(&s.toward_lo), eval_all(&s.toward_hi)) {
        (Ok(a), Ok(b), Ok(c)) => (a, b, c),
        (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
            v.push(e);
            return;
        }
    };

    if p.direction == Direction::Constant {
        if let Some((t, y)) = s.interior.iter().zip(&ys).find(|(_, y)| !close(**y, l)) {
            v.push(Violation::InconsistentLimits {
                location: format!("{loc}.expr at x = {t}"),
                declared: l,
                found: *y,
            });
        }
        if let Some(f) = &p.antiderivative {
            check_antiderivative(&format!("{loc}.antiderivative"), p, f, v);
        }
        return;
    }

    let sign = if p.direction == Direction::Increasing { 1.0 } else { -1.0 };
    for (w, t) in ys.windows(2).zip(s.interior.windows(2)) {
        let slack = 1e-12 * w[0].abs().max(w[1].abs()) + 1e-300;
        if sign * (w[1] - w[0]) < -slack {
            v.push(Violation::NonMonotonePiece {
                location: loc.clone(),
                direction: p.direction,
                at: t[1],
            });
            return;
        }
    }
    // Declared limits must bracket the samples in the declared direction.
    if let (Some(first), Some(last)) = (ys.first(), ys.last()) {
        if sign * (first - l) < 0.0 && !close(*first, l) {
            v.push(Violation::InconsistentLimits {
                location: format!("{loc}.left_limit"),
                declared: l,
                found: *first,
            });
        }
        if sign * (r - last) < 0.0 && !close(*last, r) {
            v.push(Violation::InconsistentLimits {
                location: format!("{loc}.right_limit"),
                declared: r,
                found: *last,
            });
        }
    }
    if !limit_consistent(l, &lo_probe) {
        v.push(Violation::InconsistentLimits {
            location: format!("{loc}.left_limit"),
            declared: l,
            found: *lo_probe.last().unwrap_or(&f64::NAN),
        });
    }
    if !limit_consistent(r, &hi_probe) {
        v.push(Violation::InconsistentLimits {
            location: format!("{loc}.right_limit"),
            declared: r,
            found: *hi_probe.last().unwrap_or(&f64::NAN),
        });
    }

    if let Some(f) = &p.antiderivative {
        check_antiderivative(&format!("{loc}.antiderivative"), p, f, v);
    }
}

/// Central difference quotients of `F` against the evaluator at 32 points.
fn check_antiderivative(location: &str, p: &MonotonePiece, f: &Expr, v: &mut Vec<Violation>) {
    let probes: Vec<f64> = if p.hi.is_finite() {
        let w = p.hi - p.lo;
        (0..ANTIDERIVATIVE_PROBES)
            .map(|j| p.lo + w * (j as f64 + 0.5) / ANTIDERIVATIVE_PROBES as f64)
            .collect()
    } else {
        let s = scale_of(p);
        (0..ANTIDERIVATIVE_PROBES)
            .map(|j| p.lo + s * 0.25 * 1.5f64.powi(j as i32))
            .collect()
    };
    let size = p.left_limit.abs().max(p.right_limit.abs());
    for t in probes {
        let room = (t - p.lo).min(p.hi - t);
        let h = (1e-5 * t.abs().max(1.0)).min(0.5 * room);
        let fail = || Violation::BadAntiderivative {
            location: location.to_string(),
            at: t,
        };
        let (Ok(y), Ok(a), Ok(b)) = (p.sample(t), f.eval(t + h), f.eval(t - h)) else {
            v.push(fail());
            return;
        };
        let dq = (a - b) / (2.0 * h);
        let tol = ANTIDERIVATIVE_REL * y.abs().max(dq.abs())
            + 1e-8 * (1.0 + size)
            + 8.0 * f64::EPSILON * (a.abs() + b.abs()) / h;
        if (dq - y).abs() > tol {
            v.push(fail());
            return;
        }
    }
}

fn check_tail_antiderivative(last: &MonotonePiece, tail: &TailSpec, v: &mut Vec<Violation>) {
    let (Some(f), Some(limit)) = (&tail.antiderivative, tail.antiderivative_limit) else {
        return;
    };
    if last.antiderivative.as_ref() != Some(f) {
        check_antiderivative("tail.antiderivative", last, f, v);
    }
    let s = scale_of(last);
    let probes: std::result::Result<Vec<f64>, _> = (1..=APPROACH)
        .map(|k| f.eval(last.lo + s * 2f64.powi(k)))
        .collect();
    let Ok(probes) = probes else {
        if limit.is_finite() {
            v.push(Violation::BadAntiderivative {
                location: "tail.antiderivative_limit".into(),
                at: f64::INFINITY,
            });
        }
        return;
    };
    let ok = if limit.is_finite() {
        limit_consistent(limit, &probes)
    } else {
        let (mid, end) = (probes[probes.len() / 2], probes[probes.len() - 1]);
        limit.signum() * (end - mid) > 0.0
    };
    if !ok {
        v.push(Violation::InconsistentLimits {
            location: "tail.antiderivative_limit".into(),
            declared: limit,
            found: probes[probes.len() - 1],
        });
    }
}
