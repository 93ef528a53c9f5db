//! Python bindings for `bvsum-core`.

use bvsum_core::euler_maclaurin::{self as em, Convergence, IdentityCheck};
use bvsum_core::measure;
use bvsum_core::{spec_file, Certified, Error, Interval};
use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

pyo3::create_exception!(bvsum, ToleranceUnreachable, PyRuntimeError);
pyo3::create_exception!(bvsum, SeriesDivergent, PyArithmeticError);
pyo3::create_exception!(bvsum, MissingAntiderivative, PyValueError);

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::ToleranceUnreachable { .. } => ToleranceUnreachable::new_err(msg),
        Error::SeriesDivergent => SeriesDivergent::new_err(msg),
        Error::MissingAntiderivative => MissingAntiderivative::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

fn file_err(e: spec_file::SpecFileError) -> PyErr {
    match e {
        spec_file::SpecFileError::Invalid(inner) => to_py(inner),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn pair(c: Certified) -> (f64, f64) {
    (c.value, c.radius)
}

fn check_dict<'py>(py: Python<'py>, c: &IdentityCheck) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("lhs", pair(c.lhs))?;
    d.set_item("rhs", pair(c.rhs))?;
    d.set_item("residual", c.residual)?;
    d.set_item("budget", c.budget)?;
    d.set_item("passed", c.passed())?;
    Ok(d)
}

/// A piecewise-monotone function of bounded variation.
#[pyclass(name = "BvFunction", module = "bvsum", frozen)]
struct PyBvFunction {
    inner: bvsum_core::BvFunction,
}

#[pymethods]
impl PyBvFunction {
    /// Parse a function spec from JSON text.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        spec_file::from_str(text).map(|inner| PyBvFunction { inner }).map_err(file_err)
    }

    /// Load a function spec file.
    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        spec_file::load(&path)
            .map(|inner| PyBvFunction { inner })
            .map_err(|e| PyValueError::new_err(format!("{}: {e}", path.display())))
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }

    fn __call__(&self, x: f64) -> PyResult<f64> {
        self.inner.eval(x).map_err(to_py)
    }

    /// `(f(x-), f(x), f(x+))`.
    fn limits(&self, x: f64) -> PyResult<(f64, f64, f64)> {
        self.inner.limits(x).map_err(to_py)
    }

    fn mid_value(&self, x: f64) -> PyResult<f64> {
        self.inner.mid_value(x).map_err(to_py)
    }

    #[pyo3(signature = (lo, hi, closed_lo = true, closed_hi = true))]
    fn pointwise_variation(&self, lo: f64, hi: f64, closed_lo: bool, closed_hi: bool) -> PyResult<f64> {
        self.inner
            .pointwise_variation(Interval::new(lo, hi, closed_lo, closed_hi))
            .map_err(to_py)
    }

    fn total_variation_measure(&self, lo: f64, hi: f64) -> PyResult<f64> {
        measure::total_variation_measure(&self.inner, lo, hi).map_err(to_py)
    }

    fn rho_sum(&self, lo: f64, hi: f64) -> PyResult<f64> {
        self.inner.rho_sum(lo, hi).map_err(to_py)
    }

    /// `(f1, f2)` nondecreasing with `f = f1 - f2`.
    fn jordan_decompose(&self) -> (PyBvFunction, PyBvFunction) {
        let (f1, f2) = self.inner.jordan_decompose();
        (PyBvFunction { inner: f1 }, PyBvFunction { inner: f2 })
    }

    /// Certified `(value, radius)` of the integral over `[a, b]`.
    #[pyo3(signature = (a, b, tol = 1e-10))]
    fn integrate(&self, a: f64, b: f64, tol: f64) -> PyResult<(f64, f64)> {
        measure::integrate(&self.inner, a, b, tol).map(pair).map_err(to_py)
    }

    fn direct_sum(&self, a: i64, b: i64) -> PyResult<f64> {
        em::direct_sum(&self.inner, a, b).map_err(to_py)
    }

    /// Euler-Maclaurin report for `sum_{a <= k < b} f(k)`.
    #[pyo3(signature = (a, b, tol = 1e-10))]
    fn em_finite_sum<'py>(&self, py: Python<'py>, a: i64, b: i64, tol: f64) -> PyResult<Bound<'py, PyDict>> {
        let r = em::em_finite_sum(&self.inner, a, b, tol).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("exact_sum", r.exact_sum)?;
        d.set_item("integral", pair(r.integral_term))?;
        d.set_item("boundary_term", r.boundary_term)?;
        d.set_item("remainder_bound", r.remainder_bound)?;
        d.set_item("approx", pair(r.approx))?;
        Ok(d)
    }

    /// Certified Euler constant estimated from the cut-off `n`.
    #[pyo3(signature = (n, tol = 1e-10))]
    fn euler_constant<'py>(&self, py: Python<'py>, n: i64, tol: f64) -> PyResult<Bound<'py, PyDict>> {
        let g = em::euler_constant(&self.inner, n, tol).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("n", g.n)?;
        d.set_item("gamma_n", pair(g.gamma_n))?;
        d.set_item("estimate", pair(g.gamma_estimate))?;
        d.set_item("remainder_bound", g.remainder_bound)?;
        Ok(d)
    }

    /// Certified `(value, radius)` of `sum_{k >= 0} f(k)`.
    #[pyo3(signature = (n, tol = 1e-10))]
    fn series_sum(&self, n: i64, tol: f64) -> PyResult<(f64, f64)> {
        em::series_sum(&self.inner, n, tol).map(pair).map_err(to_py)
    }

    /// `"both converge"` or `"both diverge"`.
    fn classify_convergence(&self) -> PyResult<&'static str> {
        em::classify_convergence(&self.inner).map_err(to_py).map(|c| match c {
            Convergence::BothConverge => "both converge",
            Convergence::BothDiverge => "both diverge",
        })
    }

    #[pyo3(signature = (a, b, tol = 1e-10))]
    fn midvalue_check<'py>(&self, py: Python<'py>, a: i64, b: i64, tol: f64) -> PyResult<Bound<'py, PyDict>> {
        let c = em::em_midvalue_check(&self.inner, a, b, tol).map_err(to_py)?;
        check_dict(py, &c)
    }

    #[pyo3(signature = (g, a, b, tol = 1e-6))]
    fn parts_check<'py>(
        &self,
        py: Python<'py>,
        g: &PyBvFunction,
        a: f64,
        b: f64,
        tol: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let c = em::parts_check(&self.inner, &g.inner, a, b, tol).map_err(to_py)?;
        check_dict(py, &c)
    }

    fn pvv_check<'py>(&self, py: Python<'py>, lo: f64, hi: f64) -> PyResult<Bound<'py, PyDict>> {
        let c = em::pvv_check(&self.inner, lo, hi).map_err(to_py)?;
        check_dict(py, &c)
    }

    fn __repr__(&self) -> String {
        let (lo, hi) = self.inner.domain();
        format!("BvFunction({:?}, domain=[{lo}, {hi}])", self.inner.name())
    }
}

/// Evaluate an expression in `x`.
#[pyfunction]
fn eval_expr(text: &str, x: f64) -> PyResult<f64> {
    let e = bvsum_core::parse(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    e.eval(x).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Periodic first Bernoulli function, zero at integers.
#[pyfunction]
fn beta1(x: f64) -> f64 {
    measure::beta1(x)
}

#[pymodule]
fn bvsum(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBvFunction>()?;
    m.add_function(wrap_pyfunction!(eval_expr, m)?)?;
    m.add_function(wrap_pyfunction!(beta1, m)?)?;
    m.add("ToleranceUnreachable", m.py().get_type::<ToleranceUnreachable>())?;
    m.add("SeriesDivergent", m.py().get_type::<SeriesDivergent>())?;
    m.add("MissingAntiderivative", m.py().get_type::<MissingAntiderivative>())?;
    Ok(())
}
