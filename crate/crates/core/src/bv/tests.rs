use proptest::prelude::*;

use super::*;
use crate::error::Violation;
use crate::fixtures::*;

fn piece(lo: f64, hi: f64, expr: &str, direction: Direction, l: f64, r: f64) -> PieceSpec {
    PieceSpec {
        lo,
        hi,
        expr: expr.into(),
        direction,
        left_limit: l,
        right_limit: r,
        antiderivative: None,
    }
}

fn compact(lo: f64, hi: f64, pieces: Vec<PieceSpec>, breakpoints: Vec<Breakpoint>) -> FunctionSpec {
    FunctionSpec {
        name: "t".into(),
        lo,
        hi,
        pieces,
        breakpoints,
        tail: None,
    }
}

fn violations(spec: &FunctionSpec) -> Vec<Violation> {
    match validate(spec) {
        Err(Error::Invalid(v)) => v,
        other => panic!("expected violations, got {other:?}"),
    }
}

/// Brute-force variation over a sorted grid.
fn grid_variation(f: &BvFunction, ts: &[f64]) -> f64 {
    let ys: Vec<f64> = ts.iter().map(|&t| f.eval(t).unwrap()).collect();
    ys.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

#[test]
fn identity_is_valid() {
    let f = validate(&compact(
        0.0,
        10.0,
        vec![piece(0.0, 10.0, "x", Direction::Increasing, 0.0, 10.0)],
        vec![],
    ))
    .unwrap();
    assert_eq!(f.eval(2.5).unwrap(), 2.5);
    assert_eq!(f.eval(0.0).unwrap(), 0.0);
    assert_eq!(f.eval(10.0).unwrap(), 10.0);
    assert_eq!(f.eval(-1.0), Err(Error::Domain { x: -1.0, lo: 0.0, hi: 10.0 }));
}

#[test]
fn sine_declared_increasing_is_rejected() {
    let v = violations(&compact(
        0.0,
        10.0,
        vec![piece(0.0, 10.0, "sin(x)", Direction::Increasing, 0.0, 10f64.sin())],
        vec![],
    ));
    assert!(
        v.iter().any(|v| matches!(v, Violation::NonMonotonePiece { location, .. } if location == "pieces[0]")),
        "{v:?}"
    );
}

#[test]
fn sampled_direction_violation_is_located() {
    let v = violations(&compact(
        0.0,
        10.0,
        vec![piece(0.0, 10.0, "sin(x)", Direction::Increasing, 0.0, 1.0)],
        vec![],
    ));
    match &v[0] {
        Violation::NonMonotonePiece { at, .. } => {
            assert!(*at > std::f64::consts::FRAC_PI_2 && *at < 1.6, "{at}")
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn breakpoint_mismatch_is_rejected() {
    let v = violations(&compact(
        0.0,
        2.0,
        vec![
            piece(0.0, 1.0, "x", Direction::Increasing, 0.0, 1.0),
            piece(1.0, 2.0, "x", Direction::Increasing, 1.0, 2.0),
        ],
        vec![Breakpoint::new(1.0, 0.0, 1.0, 1.0)],
    ));
    assert!(matches!(
        &v[0],
        Violation::InconsistentLimits { location, declared, found }
            if location == "breakpoints[0].left" && *declared == 0.0 && *found == 1.0
    ));
}

#[test]
fn partition_errors() {
    let v = violations(&compact(
        0.0,
        3.0,
        vec![
            piece(0.0, 1.0, "1", Direction::Constant, 1.0, 1.0),
            piece(1.5, 3.0, "1", Direction::Constant, 1.0, 1.0),
        ],
        vec![],
    ));
    assert!(matches!(&v[0], Violation::BadPartition { location, .. } if location == "pieces[1]"));

    let v = violations(&compact(
        0.0,
        2.0,
        vec![piece(0.0, 2.0, "1", Direction::Constant, 1.0, 1.0)],
        vec![Breakpoint::continuous(1.0, 1.0)],
    ));
    assert!(matches!(&v[0], Violation::BadPartition { location, .. } if location == "breakpoints[0]"));

    let mut spec = compact(
        0.0,
        f64::INFINITY,
        vec![piece(0.0, f64::INFINITY, "1/(1+x)", Direction::Decreasing, 1.0, 0.0)],
        vec![],
    );
    assert_eq!(violations(&spec), vec![Violation::MissingTail]);
    spec.tail = Some(TailInput {
        limit: 0.0,
        antiderivative: None,
        antiderivative_limit: None,
    });
    assert!(validate(&spec).is_ok());
}

#[test]
fn jump_without_breakpoint_is_rejected() {
    let v = violations(&compact(
        0.0,
        2.0,
        vec![
            piece(0.0, 1.0, "0", Direction::Constant, 0.0, 0.0),
            piece(1.0, 2.0, "1", Direction::Constant, 1.0, 1.0),
        ],
        vec![],
    ));
    assert!(matches!(&v[0], Violation::InconsistentLimits { location, .. } if location == "pieces[1].left_limit"));
}

#[test]
fn wrong_limit_and_antiderivative_are_rejected() {
    let v = violations(&compact(
        0.0,
        1.0,
        vec![piece(0.0, 1.0, "exp(x)", Direction::Increasing, 1.0, 2.0)],
        vec![],
    ));
    assert!(v.iter().any(|v| v.location() == "pieces[0].right_limit"), "{v:?}");

    let mut p = piece(0.0, 1.0, "exp(x)", Direction::Increasing, 1.0, std::f64::consts::E);
    p.antiderivative = Some("exp(2*x)".into());
    let v = violations(&compact(0.0, 1.0, vec![p], vec![]));
    assert!(matches!(&v[0], Violation::BadAntiderivative { .. }), "{v:?}");
}

#[test]
fn slow_limits_are_accepted() {
    let mut p = piece(0.0, 4.0, "sqrt(x)", Direction::Increasing, 0.0, 2.0);
    p.antiderivative = Some("2/3*x^1.5".into());
    assert!(validate(&compact(0.0, 4.0, vec![p], vec![])).is_ok());
}

#[test]
fn evaluation_failures_are_reported() {
    let v = violations(&compact(
        -1.0,
        1.0,
        vec![piece(-1.0, 1.0, "log(x)", Direction::Increasing, -40.0, 0.0)],
        vec![],
    ));
    assert!(matches!(&v[0], Violation::EvaluationFailed { .. }), "{v:?}");
}

#[test]
fn breakpoint_values_are_authoritative() {
    let f = floor_model(3);
    assert_eq!(f.eval(1.0).unwrap(), 1.0);
    assert_eq!(f.limits(1.0).unwrap(), (0.0, 1.0, 1.0));
    assert_eq!(f.eval(2.5).unwrap(), 2.0);

    let half = load(
        r#"{"name": "h", "domain": {"lo": 0, "hi": 2},
            "pieces": [{"interval": [0, 1], "expr": "0", "direction": "const", "left_limit": 0, "right_limit": 0},
                       {"interval": [1, 2], "expr": "1", "direction": "const", "left_limit": 1, "right_limit": 1}],
            "breakpoints": [{"x": 1, "left": 0, "value": 0.5, "right": 1}]}"#,
    );
    assert_eq!(half.limits(1.0).unwrap(), (0.0, 0.5, 1.0));
    assert_eq!(half.mid_value(1.0).unwrap(), 0.5);
    assert_eq!(half.rho(1.0).unwrap(), 0.0);
}

#[test]
fn limits_and_mid_values() {
    let h = harmonic();
    assert_eq!(h.limits(0.0).unwrap(), (1.0, 1.0, 1.0));
    assert_eq!(h.limits(3.0).unwrap(), (0.25, 0.25, 0.25));
    assert_eq!(h.mid_value(3.0).unwrap(), h.eval(3.0).unwrap());

    let odd = load(
        r#"{"name": "odd", "domain": {"lo": 0, "hi": 4},
            "pieces": [{"interval": [0, 2], "expr": "-1", "direction": "const", "left_limit": -1, "right_limit": -1},
                       {"interval": [2, 4], "expr": "1", "direction": "const", "left_limit": 1, "right_limit": 1}],
            "breakpoints": [{"x": 2, "left": -1, "value": 7, "right": 1}]}"#,
    );
    assert_eq!(odd.mid_value(2.0).unwrap(), 0.0);
    assert_eq!(odd.eval(2.0).unwrap(), 7.0);
}

#[test]
fn endpoint_convention_and_exterior_limits() {
    let q = load(
        r#"{"name": "q", "domain": {"lo": 0, "hi": 1},
            "pieces": [{"interval": [0, 1], "expr": "x", "direction": "inc", "left_limit": 0, "right_limit": 1}]}"#,
    );
    assert_eq!(q.limits(0.0).unwrap(), (0.0, 0.0, 0.0));
    assert_eq!(q.exterior_left_limit(0.0), Err(Error::ExteriorLimitRequired { x: 0.0 }));
    assert_eq!(q.exterior_right_limit(1.0), Err(Error::ExteriorLimitRequired { x: 1.0 }));
    assert_eq!(q.exterior_left_limit(1.0).unwrap(), 1.0);
    assert_eq!(floor_model(3).exterior_left_limit(0.0).unwrap(), -1.0);
}

#[test]
fn rho_values() {
    assert_eq!(rho(0.0, 0.5, 1.0), 0.0);
    assert_eq!(rho(0.0, 2.0, 1.0), 2.0);
    assert_eq!(rho(1.0, -1.0, 0.0), 2.0);
    assert_eq!(rho(3.0, 3.0, 3.0), 0.0);
    assert_eq!(step_rho().rho(1.0).unwrap(), 2.0);
    assert_eq!(harmonic().rho(5.0).unwrap(), 0.0);
}

#[test]
fn variation_examples() {
    let s = step_rho();
    assert_eq!(s.pointwise_variation(Interval::closed(0.0, 2.0)).unwrap(), 3.0);
    assert_eq!(s.pointwise_variation(Interval::open(0.0, 2.0)).unwrap(), 3.0);
    assert_eq!(s.rho_sum(0.0, 2.0).unwrap(), 2.0);

    let x = linear(0.0, 10.0);
    assert_eq!(x.pointwise_variation(Interval::closed(0.0, 10.0)).unwrap(), 10.0);
    assert_eq!(x.pointwise_variation(Interval::closed(3.0, 3.0)).unwrap(), 0.0);

    let h = harmonic();
    for n in [0.0, 1.0, 10.0, 100.0] {
        let pv = h.pointwise_variation(Interval::closed(n, f64::INFINITY)).unwrap();
        assert!((pv - 1.0 / (1.0 + n)).abs() < 1e-16, "{n}: {pv}");
    }
    assert_eq!(
        x.pointwise_variation(Interval::closed(-1.0, 2.0)),
        Err(Error::Domain { x: -1.0, lo: 0.0, hi: 10.0 })
    );
}

#[test]
fn variation_matches_grid_oracle() {
    for f in [floor_model(6), step_rho(), v_shape(), jump_quarter(), linear(0.0, 5.0)] {
        let (lo, hi) = f.domain();
        let mut ts: Vec<f64> = (0..=10_000).map(|i| lo + (hi - lo) * i as f64 / 10_000.0).collect();
        ts.extend(f.breakpoints().iter().map(|b| b.x));
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let pv = f.pointwise_variation(Interval::closed(lo, hi)).unwrap();
        let grid = grid_variation(&f, &ts);
        assert!(grid <= pv + 1e-12, "{}", f.name());
        assert!((grid - pv).abs() <= 1e-6, "{}: {grid} vs {pv}", f.name());
    }
}

#[test]
fn closed_minus_open_is_endpoint_terms() {
    let f = floor_model(5);
    let closed = f.pointwise_variation(Interval::closed(1.0, 3.0)).unwrap();
    let open = f.pointwise_variation(Interval::open(1.0, 3.0)).unwrap();
    let (l, r) = f.endpoint_terms(Interval::closed(1.0, 3.0)).unwrap();
    assert_eq!((l, r), (0.0, 1.0));
    assert_eq!(closed - open, l + r);
}

#[test]
fn monotone_direction() {
    assert_eq!(linear(0.0, 4.0).monotone_direction_on(0.0, 4.0).unwrap(), Some(Direction::Increasing));
    assert_eq!(floor_model(4).monotone_direction_on(0.0, 4.0).unwrap(), Some(Direction::Increasing));
    assert_eq!(harmonic().monotone_direction_on(0.0, 9.0).unwrap(), Some(Direction::Decreasing));
    assert_eq!(v_shape().monotone_direction_on(0.0, 2.0).unwrap(), None);
    assert_eq!(v_shape().monotone_direction_on(1.0, 2.0).unwrap(), Some(Direction::Increasing));
    assert_eq!(step_rho().monotone_direction_on(0.0, 2.0).unwrap(), None);
    assert_eq!(constant(1.0, 3.0).monotone_direction_on(0.0, 3.0).unwrap(), Some(Direction::Constant));
}

fn check_jordan(f: &BvFunction) {
    let (f1, f2) = f.jordan_decompose();
    let (lo, hi) = f.domain();
    let hi = if hi.is_finite() { hi } else { lo + 50.0 };
    let mut ts: Vec<f64> = (0..=1024).map(|i| lo + (hi - lo) * i as f64 / 1024.0).collect();
    ts.extend(f.breakpoints().iter().map(|b| b.x).filter(|&x| x <= hi));
    ts.sort_by(f64::total_cmp);
    let (mut p1, mut p2) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &t in &ts {
        let (a, b, c) = (f.eval(t).unwrap(), f1.eval(t).unwrap(), f2.eval(t).unwrap());
        assert!((b - c - a).abs() <= 1e-12 * (1.0 + a.abs()), "{} at {t}: {b} - {c} != {a}", f.name());
        assert!(b >= p1 - 1e-12 && c >= p2 - 1e-12, "{} not nondecreasing at {t}", f.name());
        (p1, p2) = (b, c);
    }
    let iv = Interval::closed(lo, f.domain().1);
    let total = f1.pointwise_variation(iv).unwrap() + f2.pointwise_variation(iv).unwrap();
    assert!((total - f.pointwise_variation(iv).unwrap()).abs() < 1e-10, "{}", f.name());
}

#[test]
fn jordan_decomposition() {
    for f in [floor_model(6), step_rho(), v_shape(), jump_quarter(), linear(0.0, 5.0), harmonic(), basel()] {
        check_jordan(&f);
    }
    let (f1, f2) = v_shape().jordan_decompose();
    let iv = Interval::closed(0.0, 2.0);
    assert_eq!(f1.pointwise_variation(iv).unwrap(), 1.0);
    assert_eq!(f2.pointwise_variation(iv).unwrap(), 1.0);

    let (f1, f2) = linear(0.0, 5.0).jordan_decompose();
    assert_eq!(f1.eval(3.0).unwrap(), 3.0);
    assert_eq!(f2.eval(3.0).unwrap(), 0.0);

    let neg = load(
        r#"{"name": "neg", "domain": {"lo": 0, "hi": 1},
            "pieces": [{"interval": [0, 1], "expr": "-x", "direction": "dec", "left_limit": 0, "right_limit": -1}]}"#,
    );
    let (f1, f2) = neg.jordan_decompose();
    assert_eq!(f1.eval(0.5).unwrap(), 0.0);
    assert_eq!(f2.eval(0.5).unwrap(), 0.5);
}

#[test]
fn jordan_parts_carry_antiderivatives() {
    let (f1, f2) = v_shape().jordan_decompose();
    let i1 = crate::measure::integrate(&f1, 0.0, 2.0, 1e-10).unwrap();
    let i2 = crate::measure::integrate(&f2, 0.0, 2.0, 1e-10).unwrap();
    let i = crate::measure::integrate(&v_shape(), 0.0, 2.0, 1e-10).unwrap();
    assert!((i1 - i2).intersects(&i));
}

proptest! {
    #[test]
    fn variation_is_additive(a in 0.0f64..6.0, m in 0.0f64..6.0, b in 0.0f64..6.0) {
        let mut v = [a, m, b];
        v.sort_by(f64::total_cmp);
        let [a, m, b] = v;
        for f in [floor_model(6), v_shape_on(6.0)] {
            let whole = f.pointwise_variation(Interval::closed(a, b)).unwrap();
            let left = f.pointwise_variation(Interval::closed(a, m)).unwrap();
            let right = f.pointwise_variation(Interval::closed(m, b)).unwrap();
            prop_assert!((whole - left - right).abs() <= 1e-12, "{} {} {}", whole, left, right);
        }
    }

    #[test]
    fn open_variation_identity(a in 0.0f64..6.0, b in 0.0f64..6.0) {
        prop_assume!(a != b);
        let (a, b) = (a.min(b), a.max(b));
        let f = floor_model(6);
        let pv = f.pointwise_variation(Interval::open(a, b)).unwrap();
        let mu = crate::measure::total_variation_measure(&f, a, b).unwrap();
        prop_assert!((pv - mu - f.rho_sum(a, b).unwrap()).abs() <= 1e-12);
    }
}

fn v_shape_on(hi: f64) -> BvFunction {
    let m = hi / 2.0;
    load(&format!(
        r#"{{"name": "v", "domain": {{"lo": 0, "hi": {hi}}},
            "pieces": [{{"interval": [0, {m}], "expr": "{m} - x", "direction": "dec", "left_limit": {m}, "right_limit": 0}},
                       {{"interval": [{m}, {hi}], "expr": "x - {m}", "direction": "inc", "left_limit": 0, "right_limit": {m}}}]}}"#
    ))
}
