use crate::bv::BvFunction;
use crate::spec_file;

pub fn load(json: &str) -> BvFunction {
    spec_file::from_str(json).unwrap_or_else(|e| panic!("fixture rejected: {e}"))
}

/// `x` on `[lo, hi]`.
pub fn linear(lo: f64, hi: f64) -> BvFunction {
    load(&format!(
        r#"{{"name": "linear", "domain": {{"lo": {lo}, "hi": {hi}}},
            "pieces": [{{"interval": [{lo}, {hi}], "expr": "x", "direction": "inc",
                         "left_limit": {lo}, "right_limit": {hi}, "antiderivative": "x^2/2"}}],
            "breakpoints": [{{"x": {lo}, "left": {lo}, "value": {lo}, "right": {lo}}}]}}"#
    ))
}

pub fn constant(c: f64, hi: f64) -> BvFunction {
    load(&format!(
        r#"{{"name": "constant", "domain": {{"lo": 0, "hi": {hi}}},
            "pieces": [{{"interval": [0, {hi}], "expr": "{c}", "direction": "const",
                         "left_limit": {c}, "right_limit": {c}}}],
            "breakpoints": [{{"x": 0, "left": {c}, "value": {c}, "right": {c}}}]}}"#
    ))
}

pub fn constant_half_line(c: f64) -> BvFunction {
    load(&format!(
        r#"{{"name": "constant", "domain": {{"lo": 0, "hi": "inf"}},
            "pieces": [{{"interval": [0, "inf"], "expr": "{c}", "direction": "const",
                         "left_limit": {c}, "right_limit": {c}}}],
            "breakpoints": [{{"x": 0, "left": {c}, "value": {c}, "right": {c}}}],
            "tail": {{"limit": {c}}}}}"#
    ))
}

/// `1/(1+x)` on `[0, inf)`.
pub fn harmonic() -> BvFunction {
    load(
        r#"{"name": "harmonic", "domain": {"lo": 0, "hi": "inf"},
            "pieces": [{"interval": [0, "inf"], "expr": "1/(1+x)", "direction": "dec",
                        "left_limit": 1, "right_limit": 0, "antiderivative": "log(1+x)"}],
            "breakpoints": [{"x": 0, "left": 1, "value": 1, "right": 1}],
            "tail": {"limit": 0, "antiderivative": "log(1+x)", "antiderivative_limit": "inf"}}"#,
    )
}

/// `1/(1+x)^2` on `[0, inf)`.
pub fn basel() -> BvFunction {
    load(
        r#"{"name": "basel", "domain": {"lo": 0, "hi": "inf"},
            "pieces": [{"interval": [0, "inf"], "expr": "1/(1+x)^2", "direction": "dec",
                        "left_limit": 1, "right_limit": 0, "antiderivative": "-1/(1+x)"}],
            "breakpoints": [{"x": 0, "left": 1, "value": 1, "right": 1}],
            "tail": {"limit": 0, "antiderivative": "-1/(1+x)", "antiderivative_limit": 0}}"#,
    )
}

/// Two constant pieces 0 and 1 on `[0, 2]` with the misplaced value `f(1) = 2`.
pub fn step_rho() -> BvFunction {
    load(
        r#"{"name": "step", "domain": {"lo": 0, "hi": 2},
            "pieces": [{"interval": [0, 1], "expr": "0", "direction": "const", "left_limit": 0, "right_limit": 0},
                       {"interval": [1, 2], "expr": "1", "direction": "const", "left_limit": 1, "right_limit": 1}],
            "breakpoints": [{"x": 1, "left": 0, "value": 2, "right": 1}]}"#,
    )
}

/// `floor(x)` on `[0, n]` with `f(0-) = -1`.
pub fn floor_model(n: usize) -> BvFunction {
    let pieces: Vec<String> = (0..n)
        .map(|k| {
            format!(
                r#"{{"interval": [{k}, {}], "expr": "{k}", "direction": "const",
                     "left_limit": {k}, "right_limit": {k}}}"#,
                k + 1
            )
        })
        .collect();
    let breakpoints: Vec<String> = (0..=n)
        .map(|k| {
            let k = k as i64;
            format!(r#"{{"x": {k}, "left": {}, "value": {k}, "right": {k}}}"#, k - 1)
        })
        .collect();
    load(&format!(
        r#"{{"name": "floor", "domain": {{"lo": 0, "hi": {n}}},
            "pieces": [{}], "breakpoints": [{}]}}"#,
        pieces.join(","),
        breakpoints.join(",")
    ))
}

/// `1 - x` on `(0, 1)`, `x - 1` on `(1, 2)`.
pub fn v_shape() -> BvFunction {
    load(
        r#"{"name": "v", "domain": {"lo": 0, "hi": 2},
            "pieces": [{"interval": [0, 1], "expr": "1 - x", "direction": "dec", "left_limit": 1, "right_limit": 0,
                        "antiderivative": "x - x^2/2"},
                       {"interval": [1, 2], "expr": "x - 1", "direction": "inc", "left_limit": 0, "right_limit": 1,
                        "antiderivative": "x^2/2 - x"}],
            "breakpoints": [{"x": 0, "left": 1, "value": 1, "right": 1}]}"#,
    )
}

/// Unit jump at `0.25` on `[0, 1]`: 0 before, 1 after, `f(0.25) = 0.5`.
pub fn jump_quarter() -> BvFunction {
    load(
        r#"{"name": "jump_quarter", "domain": {"lo": 0, "hi": 1},
            "pieces": [{"interval": [0, 0.25], "expr": "0", "direction": "const", "left_limit": 0, "right_limit": 0},
                       {"interval": [0.25, 1], "expr": "1", "direction": "const", "left_limit": 1, "right_limit": 1}],
            "breakpoints": [{"x": 0, "left": 0, "value": 0, "right": 0},
                            {"x": 0.25, "left": 0, "value": 0.5, "right": 1},
                            {"x": 1, "left": 1, "value": 1, "right": 1}]}"#,
    )
}
