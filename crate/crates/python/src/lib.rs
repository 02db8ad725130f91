//! Python bindings for `transportq`.
//!
//! Matrices cross the boundary as lists of rows of Python `complex`, state
//! vectors as lists of `complex`. Validation errors raise `ValueError`;
//! numerical failures (loss of unitarity) raise `ArithmeticError`.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use transportq::algebra::{self, HermitianMatrix};
use transportq::derivation::{self, InnerDerivation};
use transportq::scenario::{self, ConvergenceOutcome, RunReport};
use transportq::transport;
use transportq::{cli, ComplexMatrix, HamiltonianPath, Method, PathKind, Polynomial, Sign, StateVector, C64};

type Rows = Vec<Vec<C64>>;

fn py_err(e: transportq::Error) -> PyErr {
    if e.is_numerical() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn matrix(rows: &Rows) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(rows).map_err(py_err)
}

fn hermitian(rows: &Rows) -> PyResult<HermitianMatrix> {
    HermitianMatrix::new(matrix(rows)?).map_err(py_err)
}

fn state(entries: Vec<C64>) -> PyResult<StateVector> {
    StateVector::new(entries).map_err(py_err)
}

fn method(name: &str) -> PyResult<Method> {
    name.parse().map_err(PyValueError::new_err)
}

fn sign(s: i32) -> PyResult<Sign> {
    Sign::from_i32(s).ok_or_else(|| PyValueError::new_err(format!("sign must be +1 or -1, got {s}")))
}

fn polynomial(coefficients: Vec<f64>) -> PyResult<Polynomial> {
    Polynomial::new(coefficients).map_err(py_err)
}

/// Spectral norm (largest singular value).
#[pyfunction]
fn operator_norm(a: Rows) -> PyResult<f64> {
    Ok(matrix(&a)?.operator_norm())
}

/// Conjugate transpose.
#[pyfunction]
fn adjoint(a: Rows) -> PyResult<Rows> {
    Ok(matrix(&a)?.adjoint().to_rows())
}

/// `[a, b] = ab - ba`.
#[pyfunction]
fn commutator(a: Rows, b: Rows) -> PyResult<Rows> {
    algebra::commutator(&matrix(&a)?, &matrix(&b)?)
        .map(|c| c.to_rows())
        .map_err(py_err)
}

/// Matrix exponential.
#[pyfunction]
fn expm(a: Rows) -> PyResult<Rows> {
    matrix(&a)?.exp().map(|e| e.to_rows()).map_err(py_err)
}

/// `i[H, a]`.
#[pyfunction]
fn derivation_apply(h: Rows, a: Rows) -> PyResult<Rows> {
    InnerDerivation::new(hermitian(&h)?)
        .apply(&matrix(&a)?)
        .map(|m| m.to_rows())
        .map_err(py_err)
}

/// `n² x n²` matrix of `a -> i[H, a]` acting on column-stacked matrices.
#[pyfunction]
fn derivation_superoperator(h: Rows) -> PyResult<Rows> {
    let d = InnerDerivation::new(hermitian(&h)?);
    Ok(derivation::derivation_superoperator(&d).matrix().to_rows())
}

/// `e^{irH} a e^{-irH}`.
#[pyfunction]
fn one_parameter_group(h: Rows, r: f64, a: Rows) -> PyResult<Rows> {
    let d = InnerDerivation::new(hermitian(&h)?);
    derivation::one_parameter_group(&d, r, &matrix(&a)?)
        .map(|m| m.to_rows())
        .map_err(py_err)
}

/// Leibniz-rule residual of `i[H, .]` on `(a, b)`.
#[pyfunction]
fn check_leibniz(h: Rows, a: Rows, b: Rows) -> PyResult<f64> {
    let d = InnerDerivation::new(hermitian(&h)?);
    derivation::check_leibniz(&d, &matrix(&a)?, &matrix(&b)?).map_err(py_err)
}

/// Star-compatibility residual of `i[H, .]` on `a`.
#[pyfunction]
fn check_star_compatibility(h: Rows, a: Rows) -> PyResult<f64> {
    let d = InnerDerivation::new(hermitian(&h)?);
    derivation::check_star_compatibility(&d, &matrix(&a)?).map_err(py_err)
}

/// Time-dependent Hamiltonian.
#[pyclass(name = "Hamiltonian", module = "transportq", frozen)]
struct PyHamiltonian {
    inner: HamiltonianPath,
}

impl PyHamiltonian {
    fn build(kind: PathKind, s: i32) -> PyResult<Self> {
        let inner = HamiltonianPath::new(kind, sign(s)?).map_err(py_err)?;
        Ok(Self { inner })
    }
}

#[pymethods]
impl PyHamiltonian {
    #[staticmethod]
    #[pyo3(signature = (h, sign = 1))]
    fn constant(h: Rows, sign: i32) -> PyResult<Self> {
        Self::build(PathKind::Constant(hermitian(&h)?), sign)
    }

    /// `f(t) H0` with polynomial coefficients in ascending powers.
    #[staticmethod]
    #[pyo3(signature = (coefficients, h, sign = 1))]
    fn commuting(coefficients: Vec<f64>, h: Rows, sign: i32) -> PyResult<Self> {
        Self::build(
            PathKind::Commuting {
                coefficient: polynomial(coefficients)?,
                generator: hermitian(&h)?,
            },
            sign,
        )
    }

    /// `sum_k f_k(t) P_k` from `(coefficients, matrix)` pairs.
    #[staticmethod]
    #[pyo3(signature = (terms, sign = 1))]
    fn pauli_sum(terms: Vec<(Vec<f64>, Rows)>, sign: i32) -> PyResult<Self> {
        let terms = terms
            .into_iter()
            .map(|(c, m)| Ok((polynomial(c)?, hermitian(&m)?)))
            .collect::<PyResult<Vec<_>>>()?;
        Self::build(PathKind::PauliSum(terms), sign)
    }

    /// Piecewise-linear interpolation of samples.
    #[staticmethod]
    #[pyo3(signature = (times, matrices, sign = 1))]
    fn sampled(times: Vec<f64>, matrices: Vec<Rows>, sign: i32) -> PyResult<Self> {
        let values = matrices.iter().map(hermitian).collect::<PyResult<Vec<_>>>()?;
        Self::build(PathKind::Sampled { times, values }, sign)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn sign(&self) -> i32 {
        self.inner.sign().as_i32()
    }

    fn evaluate(&self, t: f64) -> PyResult<Rows> {
        self.inner.evaluate(t).map(|h| h.matrix().to_rows()).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Hamiltonian(dim={}, sign={})", self.inner.dim(), self.inner.sign().as_i32())
    }
}

/// Propagator family `G(t_k)` on a uniform grid.
#[pyclass(name = "Transport", module = "transportq", frozen)]
struct PyTransport {
    inner: transport::TransportOperator,
}

#[pymethods]
impl PyTransport {
    #[getter]
    fn grid(&self) -> Vec<f64> {
        self.inner.grid().to_vec()
    }

    #[getter]
    fn method(&self) -> &'static str {
        self.inner.method().name()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Propagator at grid index `k`.
    fn unitary(&self, k: usize) -> PyResult<Rows> {
        if k >= self.inner.len() {
            return Err(PyValueError::new_err(format!(
                "index {k} out of range for {} grid points",
                self.inner.len()
            )));
        }
        Ok(self.inner.at(k).matrix().to_rows())
    }

    fn unitarity_defects(&self) -> Vec<f64> {
        self.inner.unitarity_defects()
    }

    /// `psi(t_k) = G(t_k) y` at every grid point.
    fn evolve_state(&self, y: Vec<C64>) -> PyResult<Vec<Vec<C64>>> {
        let section = transport::evolve_state(&self.inner, &state(y)?).map_err(py_err)?;
        Ok(section.values().iter().map(|p| p.entries()).collect())
    }

    /// `alpha(t_k) = G(t_k) a G(t_k)*` at every grid point.
    fn heisenberg(&self, a: Rows) -> PyResult<Vec<Rows>> {
        let section = transport::heisenberg_transport(&self.inner, &matrix(&a)?).map_err(py_err)?;
        Ok(section.values().iter().map(|m| m.to_rows()).collect())
    }

    /// `G(t_k)* a G(t_k)`.
    fn pullback(&self, k: usize, a: Rows) -> PyResult<Rows> {
        self.inner.pullback(k, &matrix(&a)?).map(|m| m.to_rows()).map_err(py_err)
    }
}

/// Product-integral propagator of `h` over `[t0, t1]`.
#[pyfunction]
#[pyo3(signature = (h, t0, t1, steps, method = "magnus4"))]
fn transport_path(h: &PyHamiltonian, t0: f64, t1: f64, steps: usize, method: &str) -> PyResult<PyTransport> {
    let m = self::method(method)?;
    let inner = transport::transport(&h.inner, t0, t1, steps, m).map_err(py_err)?;
    Ok(PyTransport { inner })
}

fn opt_pair(x: Option<(f64, f64)>) -> Option<C64> {
    x.map(|(re, im)| C64::new(re, im))
}

fn report_dict<'py>(py: Python<'py>, report: &RunReport) -> PyResult<Bound<'py, PyDict>> {
    let s = &report.summary;
    let summary = PyDict::new(py);
    summary.set_item("scenario", &s.scenario)?;
    summary.set_item("method", &s.method)?;
    summary.set_item("sign", s.sign)?;
    summary.set_item("steps", s.steps)?;
    summary.set_item("t_final", s.t_final)?;
    summary.set_item("max_unitarity_defect", s.max_unitarity_defect)?;
    summary.set_item("max_schrodinger_residual", s.max_schrodinger_residual)?;
    summary.set_item("max_heisenberg_residual", s.max_heisenberg_residual)?;
    summary.set_item("max_picture_gap", s.max_picture_gap)?;
    summary.set_item("convergence_slope", s.convergence.as_ref().and_then(|c| c.slope()))?;
    summary.set_item("wall_time_seconds", s.wall_time_seconds)?;

    let records = report
        .records
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("t", r.t)?;
            d.set_item("psi_norm", r.psi_norm)?;
            d.set_item("unitarity_defect", r.unitarity_defect)?;
            d.set_item("schrodinger_residual", r.schrodinger_residual)?;
            d.set_item("heisenberg_residual", r.heisenberg_residual)?;
            d.set_item("picture_gap", r.picture_gap)?;
            d.set_item("expectation", opt_pair(r.expectation))?;
            Ok(d)
        })
        .collect::<PyResult<Vec<_>>>()?;

    let out = PyDict::new(py);
    out.set_item("summary", summary)?;
    out.set_item("records", records)?;
    out.set_item("csv", cli::report_csv(report))?;
    Ok(out)
}

fn scenario_from_json(text: &str) -> PyResult<scenario::Scenario> {
    transportq::parse_config(text)
        .and_then(|c| c.to_scenario())
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Runs a scenario given as JSON config text.
///
/// Returns a dict with `summary`, per-point `records` and the `csv` text.
#[pyfunction]
fn run_config<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyDict>> {
    let s = scenario_from_json(text)?;
    let report = py.detach(|| scenario::run_scenario(&s)).map_err(py_err)?;
    report_dict(py, &report)
}

/// Runs a built-in scenario by name.
#[pyfunction]
#[pyo3(signature = (name, steps = None, method = None))]
fn run_builtin<'py>(
    py: Python<'py>,
    name: &str,
    steps: Option<usize>,
    method: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut s = scenario::builtin(name).ok_or_else(|| {
        PyValueError::new_err(format!(
            "unknown scenario `{name}`, expected one of {}",
            scenario::BUILTIN_NAMES.join(", ")
        ))
    })?;
    if let Some(n) = steps {
        s = s.with_steps(n);
    }
    if let Some(m) = method {
        s = s.with_method(self::method(m)?);
    }
    let report = py.detach(|| scenario::run_scenario(&s)).map_err(py_err)?;
    report_dict(py, &report)
}

/// Names of the built-in scenarios.
#[pyfunction]
fn builtin_names() -> Vec<&'static str> {
    scenario::BUILTIN_NAMES.to_vec()
}

/// Oracle checks of one built-in scenario as `(check, value, threshold, passed)`.
#[pyfunction]
fn verify(py: Python<'_>, name: &str) -> PyResult<Vec<(String, f64, f64, bool)>> {
    let checks = py.detach(|| scenario::verify_builtin(name)).map_err(py_err)?;
    Ok(checks
        .into_iter()
        .map(|c| {
            let passed = c.passed();
            (c.check, c.value, c.threshold, passed)
        })
        .collect())
}

/// Convergence study of a JSON-configured scenario.
///
/// Returns `(slope, [(steps, error), ...])`; the slope is `None` when the
/// method is exact to roundoff on that path.
#[pyfunction]
fn convergence_order(py: Python<'_>, text: &str, steps: Vec<usize>) -> PyResult<(Option<f64>, Vec<(usize, f64)>)> {
    let s = scenario_from_json(text)?;
    let outcome = py
        .detach(|| scenario::estimate_convergence_order(&s, &steps))
        .map_err(py_err)?;
    let slope = match &outcome {
        ConvergenceOutcome::Slope { slope, .. } => Some(*slope),
        ConvergenceOutcome::Exact { .. } => None,
    };
    Ok((slope, outcome.errors().to_vec()))
}

#[pymodule]
#[pyo3(name = "transportq")]
fn transportq_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHamiltonian>()?;
    m.add_class::<PyTransport>()?;
    m.add_function(wrap_pyfunction!(operator_norm, m)?)?;
    m.add_function(wrap_pyfunction!(adjoint, m)?)?;
    m.add_function(wrap_pyfunction!(commutator, m)?)?;
    m.add_function(wrap_pyfunction!(expm, m)?)?;
    m.add_function(wrap_pyfunction!(derivation_apply, m)?)?;
    m.add_function(wrap_pyfunction!(derivation_superoperator, m)?)?;
    m.add_function(wrap_pyfunction!(one_parameter_group, m)?)?;
    m.add_function(wrap_pyfunction!(check_leibniz, m)?)?;
    m.add_function(wrap_pyfunction!(check_star_compatibility, m)?)?;
    m.add_function(wrap_pyfunction!(transport_path, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_builtin, m)?)?;
    m.add_function(wrap_pyfunction!(builtin_names, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_order, m)?)?;
    m.add("CSV_HEADER", cli::CSV_HEADER)?;
    Ok(())
}
