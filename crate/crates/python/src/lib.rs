//! Python bindings: special functions, identity checks returning report
//! objects, the Σ(k₂) classification and the polynomial connection tables.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use sonine::error::Error;
use sonine::heckman_opdam::{self as ho, MultiplicityBC};
use sonine::hypergeom::{self, MultiplicityB, DEFAULT_MAX_WEIGHT};
use sonine::integrate::{IntegrationSpec as CoreSpec, SelbergParams};
use sonine::jack::{self, Partition};
use sonine::rankone::{self, RANK_ONE_TOL};
use sonine::report::VerificationReport;
use sonine::selberg;
use sonine::verify;

create_exception!(sonine_py, DomainError, PyValueError, "A parameter lies outside the admissible domain.");
create_exception!(sonine_py, PoleError, DomainError, "A parameter sits on a pole of a gamma product.");
create_exception!(sonine_py, ConditioningError, PyRuntimeError, "A linear solve was too ill-conditioned to trust.");

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Pole { .. } | Error::PochhammerZero { .. } => PoleError::new_err(msg),
        Error::IllConditioned(_) => ConditioningError::new_err(msg),
        _ => DomainError::new_err(msg),
    }
}

fn json_to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn partition(parts: Vec<u32>) -> PyResult<Partition> {
    Partition::new(parts).map_err(to_py)
}

fn multiplicity_bc(k: Vec<f64>) -> PyResult<MultiplicityBC> {
    match k.as_slice() {
        [k1, k2] => MultiplicityBC::rank_one(*k1, *k2).map_err(to_py),
        [k1, k2, k3] => MultiplicityBC::new(*k1, *k2, *k3).map_err(to_py),
        _ => Err(DomainError::new_err(format!("multiplicity needs 2 or 3 values, got {}", k.len()))),
    }
}

fn ones(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(1.0, 0.0); n]
}

/// How an integral is approximated.
#[pyclass(name = "IntegrationSpec", module = "sonine_py", frozen, from_py_object)]
#[derive(Clone)]
pub struct PySpec {
    inner: CoreSpec,
}

#[pymethods]
impl PySpec {
    #[staticmethod]
    #[pyo3(signature = (nodes=CoreSpec::DEFAULT_NODES))]
    fn gauss_jacobi(nodes: usize) -> Self {
        PySpec { inner: CoreSpec::gauss_jacobi(nodes, 0.0, 0.0) }
    }

    #[staticmethod]
    #[pyo3(signature = (nodes=CoreSpec::DEFAULT_NODES))]
    fn gauss_legendre(nodes: usize) -> Self {
        PySpec { inner: CoreSpec::gauss_legendre(nodes) }
    }

    #[staticmethod]
    fn trapezoid(nodes: usize) -> Self {
        PySpec { inner: CoreSpec::trapezoid(nodes) }
    }

    #[staticmethod]
    #[pyo3(signature = (samples=CoreSpec::DEFAULT_SAMPLES, seed=0))]
    fn monte_carlo(samples: usize, seed: u64) -> Self {
        PySpec { inner: CoreSpec::monte_carlo(samples, seed) }
    }

    #[getter]
    fn nodes(&self) -> usize {
        self.inner.nodes_per_axis
    }

    #[getter]
    fn samples(&self) -> usize {
        self.inner.samples
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    fn __repr__(&self) -> String {
        format!("IntegrationSpec({})", serde_json::to_string(&self.inner).unwrap_or_default())
    }
}

fn spec_or(spec: Option<PySpec>) -> CoreSpec {
    spec.map_or_else(|| CoreSpec::gauss_jacobi(CoreSpec::DEFAULT_NODES, 0.0, 0.0), |s| s.inner)
}

/// Both sides of a numerically checked identity.
#[pyclass(name = "Report", module = "sonine_py", frozen)]
pub struct PyReport {
    inner: VerificationReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn identity(&self) -> String {
        format!("{:?}", self.inner.identity)
    }

    #[getter]
    fn lhs(&self) -> Complex64 {
        self.inner.lhs
    }

    #[getter]
    fn rhs(&self) -> Complex64 {
        self.inner.rhs
    }

    #[getter]
    fn abs_residual(&self) -> f64 {
        self.inner.abs_residual
    }

    #[getter]
    fn rel_residual(&self) -> f64 {
        self.inner.rel_residual
    }

    #[getter]
    fn tolerance(&self) -> f64 {
        self.inner.tolerance
    }

    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed
    }

    #[getter]
    fn runtime_ms(&self) -> u64 {
        self.inner.runtime_ms
    }

    #[getter]
    fn notes(&self) -> Vec<String> {
        self.inner.notes.clone()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_to_py(py, &self.inner)
    }

    fn __bool__(&self) -> bool {
        self.inner.passed
    }

    fn __repr__(&self) -> String {
        format!(
            "Report({:?}, lhs={}, rhs={}, rel_residual={:e}, passed={})",
            self.inner.identity, self.inner.lhs, self.inner.rhs, self.inner.rel_residual, self.inner.passed
        )
    }
}

fn report(r: sonine::Result<VerificationReport>) -> PyResult<PyReport> {
    r.map(|inner| PyReport { inner }).map_err(to_py)
}

/// Monic Heckman-Opdam polynomials on a dominance down-set.
#[pyclass(name = "HoFamily", module = "sonine_py", frozen)]
pub struct PyHoFamily {
    inner: ho::HoFamily,
}

#[pymethods]
impl PyHoFamily {
    #[getter]
    fn weights(&self) -> Vec<Vec<u32>> {
        self.inner.weights.clone()
    }

    /// `coefficients[i][j]`: coefficient of the orbit sum of `weights[j]`.
    #[getter]
    fn coefficients(&self) -> Vec<Vec<f64>> {
        self.inner.coefficients.clone()
    }

    #[getter]
    fn at_zero(&self) -> Vec<f64> {
        self.inner.at_zero.clone()
    }

    #[getter]
    fn gram_condition(&self) -> f64 {
        self.inner.gram_condition
    }

    fn min_monic_coefficient(&self) -> f64 {
        self.inner.min_monic_coefficient()
    }

    /// Values of `R_λ = P_λ / P_λ(0)` at `t`, in weight order.
    fn eval_normalized(&self, t: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.eval_normalized(&t).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.weights.len()
    }
}

/// `R_λ(k') = Σ_ν c_{λν} R_ν(k)`.
#[pyclass(name = "ConnectionMatrix", module = "sonine_py", frozen)]
pub struct PyConnection {
    inner: ho::ConnectionMatrix,
}

#[pymethods]
impl PyConnection {
    #[getter]
    fn weights(&self) -> Vec<Vec<u32>> {
        self.inner.weights.clone()
    }

    #[getter]
    fn coefficients(&self) -> Vec<Vec<f64>> {
        self.inner.coefficients.clone()
    }

    #[getter]
    fn residuals(&self) -> Vec<f64> {
        self.inner.residuals.clone()
    }

    fn row_sums(&self) -> Vec<f64> {
        self.inner.row_sums()
    }

    fn min_coefficient(&self) -> f64 {
        self.inner.min_coefficient()
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }
}

/// Jack polynomial `C_λ^α(x)`.
#[pyfunction]
fn jack_c(lam: Vec<u32>, alpha: f64, x: Vec<Complex64>) -> PyResult<Complex64> {
    jack::jack_c(&partition(lam)?, alpha, &x).map_err(to_py)
}

/// Generalized Pochhammer symbol `(μ)_λ^α`.
#[pyfunction]
fn gen_pochhammer(mu: Complex64, lam: Vec<u32>, alpha: f64) -> PyResult<Complex64> {
    Ok(jack::gen_pochhammer(mu, &partition(lam)?, alpha))
}

/// Truncated `₀F₁^α(μ; z, w)`; `w` defaults to all ones.
#[pyfunction]
#[pyo3(signature = (alpha, mu, z, w=None, max_weight=DEFAULT_MAX_WEIGHT))]
fn hyp0f1(py: Python<'_>, alpha: f64, mu: Complex64, z: Vec<Complex64>, w: Option<Vec<Complex64>>, max_weight: u32) -> PyResult<Complex64> {
    let w = w.unwrap_or_else(|| ones(z.len()));
    py.detach(|| hypergeom::hyp0f1(alpha, mu, &z, &w, max_weight))
        .map(|s| s.value)
        .map_err(to_py)
}

/// `J_k^B(z, w)` with `k = (k1, k2)`.
#[pyfunction]
#[pyo3(signature = (k1, k2, z, w=None, max_weight=DEFAULT_MAX_WEIGHT))]
fn bessel_b(py: Python<'_>, k1: Complex64, k2: f64, z: Vec<Complex64>, w: Option<Vec<Complex64>>, max_weight: u32) -> PyResult<Complex64> {
    let k = MultiplicityB::new(k1, k2).map_err(to_py)?;
    let w = w.unwrap_or_else(|| ones(z.len()));
    py.detach(|| hypergeom::bessel_b(&k, &z, &w, max_weight))
        .map(|s| s.value)
        .map_err(to_py)
}

/// `j_a(z) = ₀F₁(a+1; -z²/4)`.
#[pyfunction]
fn bessel_1d(a: f64, z: Complex64) -> PyResult<Complex64> {
    hypergeom::bessel_1d(a, z).map_err(to_py)
}

/// Rank-one Dunkl kernel `E_k(x, z)`.
#[pyfunction]
fn dunkl_kernel_1d(k: f64, x: f64, z: Complex64) -> PyResult<Complex64> {
    hypergeom::dunkl_kernel_1d(k, x, z).map_err(to_py)
}

/// Closed-form Selberg integral `I_n(κ, μ, ν)`.
#[pyfunction]
fn selberg_in(n: usize, kappa: f64, mu: Complex64, nu: Complex64) -> PyResult<Complex64> {
    selberg::selberg_in(&SelbergParams { n, kappa, mu, nu })
        .map(|v| v.value)
        .map_err(to_py)
}

/// `(membership, j, m)`; `j` and `m` are `None` outside the discrete part.
#[pyfunction]
fn sigma_classify(h: Complex64, k2: f64, n: usize) -> (String, Option<usize>, Option<u64>) {
    match selberg::sigma_classify(h, k2, n) {
        selberg::SigmaVerdict::DiscretePart { j, m } => ("DiscretePart".into(), Some(j), Some(m)),
        v => (v.name().into(), None, None),
    }
}

/// Poles of the Sonine normalization in `[lo, hi]`.
#[pyfunction]
fn pole_set(k2: f64, n: usize, lo: f64, hi: f64) -> PyResult<Vec<f64>> {
    selberg::pole_set(k2, n, lo, hi).map_err(to_py)
}

/// Sonine density `f_{k,h}` at a point of `(0,1)^n`.
#[pyfunction]
fn sonine_density(k1: f64, k2: f64, h: f64, x: Vec<f64>) -> PyResult<f64> {
    let d = selberg::SonineDensity::real(k1, k2, h, x.len()).map_err(to_py)?;
    d.eval(&x).map(|v| v.re).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (n, kappa, mu, nu, spec=None, tol=None))]
fn verify_selberg(py: Python<'_>, n: usize, kappa: f64, mu: f64, nu: f64, spec: Option<PySpec>, tol: Option<f64>) -> PyResult<PyReport> {
    let s = spec_or(spec);
    report(py.detach(|| verify::verify_selberg(&SelbergParams::real(n, kappa, mu, nu), &s, tol)))
}

#[pyfunction]
#[pyo3(signature = (alpha, mu, nu, lam, n, spec=None, tol=None))]
fn verify_kadell(
    py: Python<'_>,
    alpha: f64,
    mu: f64,
    nu: f64,
    lam: Vec<u32>,
    n: usize,
    spec: Option<PySpec>,
    tol: Option<f64>,
) -> PyResult<PyReport> {
    let lam = partition(lam)?;
    let s = spec_or(spec);
    report(py.detach(|| verify::verify_kadell(alpha, mu, nu, &lam, n, &s, tol)))
}

#[pyfunction]
#[pyo3(signature = (alpha, mu, nu, z, spec=None, tol=None))]
fn verify_sonine_0f1(
    py: Python<'_>,
    alpha: f64,
    mu: f64,
    nu: f64,
    z: Vec<Complex64>,
    spec: Option<PySpec>,
    tol: Option<f64>,
) -> PyResult<PyReport> {
    let s = spec_or(spec);
    report(py.detach(|| verify::verify_sonine_0f1(alpha, mu, nu, &z, &s, tol)))
}

#[pyfunction]
#[pyo3(signature = (k1, k2, h, xi, spec=None, tol=None))]
fn verify_sonine_bessel_b(
    py: Python<'_>,
    k1: f64,
    k2: f64,
    h: f64,
    xi: Vec<f64>,
    spec: Option<PySpec>,
    tol: Option<f64>,
) -> PyResult<PyReport> {
    let k = MultiplicityB::real(k1, k2).map_err(to_py)?;
    let s = spec_or(spec);
    report(py.detach(|| verify::verify_sonine_bessel_b(&k, h, &xi, &s, tol)))
}

/// Boundary-integrability probe; returns a dict.
#[pyfunction]
#[pyo3(signature = (k1, k2, h, n, layers=8))]
fn probe_integrability<'py>(py: Python<'py>, k1: f64, k2: f64, h: Complex64, n: usize, layers: u32) -> PyResult<Bound<'py, PyAny>> {
    let k = MultiplicityB::real(k1, k2).map_err(to_py)?;
    let p = py.detach(|| verify::probe_integrability(&k, h, n, layers)).map_err(to_py)?;
    json_to_py(py, &p)
}

/// Σ-membership, poles, probe and conclusion as a dict.
#[pyfunction]
fn classify<'py>(py: Python<'py>, k1: f64, k2: f64, h: Complex64, n: usize) -> PyResult<Bound<'py, PyAny>> {
    let k = MultiplicityB::real(k1, k2).map_err(to_py)?;
    let c = py.detach(|| verify::classify_and_report(&k, h, n)).map_err(to_py)?;
    json_to_py(py, &c)
}

/// Classical one-variable Sonine formula.
#[pyfunction]
#[pyo3(signature = (a, b, z, spec=None, tol=RANK_ONE_TOL))]
fn sonine_1d(a: f64, b: f64, z: Complex64, spec: Option<PySpec>, tol: f64) -> PyResult<PyReport> {
    report(rankone::sonine_1d_with_tol(a, b, z, &spec_or(spec), tol))
}

/// `V_{k',k}` applied to a Python callable `f(t) -> complex` at `x`.
#[pyfunction]
#[pyo3(signature = (f, k, kp, x, nodes=48))]
fn xu_intertwine(f: Bound<'_, PyAny>, k: f64, kp: f64, x: f64, nodes: usize) -> PyResult<Complex64> {
    let failure = std::cell::RefCell::new(None);
    let g = |t: f64| match f.call1((t,)).and_then(|v| v.extract::<Complex64>()) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            Complex64::new(f64::NAN, 0.0)
        }
    };
    let out = rankone::xu_intertwine_complex(g, k, kp, x, &CoreSpec::gauss_jacobi(nodes, 0.0, 0.0));
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    out.map_err(to_py)
}

/// `V_{k',k} E_k(·, z)(x)` against `E_{k'}(x, z)`.
#[pyfunction]
#[pyo3(signature = (k, kp, x, z, spec=None, tol=1e-7))]
fn xu_kernel_check(k: f64, kp: f64, x: f64, z: Complex64, spec: Option<PySpec>, tol: f64) -> PyResult<PyReport> {
    report(rankone::xu_kernel_check(k, kp, x, z, &spec_or(spec), tol))
}

/// `R_n^{(a,b)}(x)` normalized by `R_n(1) = 1`.
#[pyfunction]
fn jacobi_r(a: f64, b: f64, n: usize, x: f64) -> PyResult<f64> {
    rankone::jacobi_r(&rankone::JacobiParams::new(a, b, n).map_err(to_py)?, x).map_err(to_py)
}

/// Rows `n = 0..=degree` of connection coefficients.
#[pyfunction]
fn jacobi_connection(a_src: f64, b: f64, a_dst: f64, degree: usize) -> PyResult<Vec<Vec<f64>>> {
    rankone::jacobi_connection(a_src, b, a_dst, degree)
        .map(|c| c.coefficients)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (k, n, cutoff, nodes=40))]
fn ho_polynomials(py: Python<'_>, k: Vec<f64>, n: usize, cutoff: u32, nodes: usize) -> PyResult<PyHoFamily> {
    let k = multiplicity_bc(k)?;
    let spec = CoreSpec::gauss_jacobi(nodes, 0.0, 0.0);
    py.detach(|| ho::HoFamily::upto(k, n, cutoff, &spec))
        .map(|inner| PyHoFamily { inner })
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (k, kp, n, cutoff, nodes=40))]
fn ho_connection(py: Python<'_>, k: Vec<f64>, kp: Vec<f64>, n: usize, cutoff: u32, nodes: usize) -> PyResult<PyConnection> {
    let (k, kp) = (multiplicity_bc(k)?, multiplicity_bc(kp)?);
    let spec = CoreSpec::gauss_jacobi(nodes, 0.0, 0.0);
    py.detach(|| ho::ho_connection(&k, &kp, n, cutoff, &spec))
        .map(|inner| PyConnection { inner })
        .map_err(to_py)
}

/// Multiplicity `(k1, k2, k3)` of the Grassmannian over `F` with `d = dim_R F`.
#[pyfunction]
fn geometric_multiplicity(d: u32, m: u32, n: u32) -> PyResult<(f64, f64, f64)> {
    let k = ho::GeometricMultiplicity::new(d, m, n).map_err(to_py)?.multiplicity();
    Ok((k.k1, k.k2, k.k3))
}

/// Rank-two sign scan as a dict.
#[pyfunction]
#[pyo3(signature = (k, kp, max_m=6, nodes=40))]
fn sign_scan<'py>(py: Python<'py>, k: Vec<f64>, kp: Vec<f64>, max_m: u32, nodes: usize) -> PyResult<Bound<'py, PyAny>> {
    let (k, kp) = (multiplicity_bc(k)?, multiplicity_bc(kp)?);
    let spec = CoreSpec::gauss_jacobi(nodes, 0.0, 0.0);
    let scan = py.detach(|| ho::sign_scan(&k, &kp, max_m, &spec)).map_err(to_py)?;
    json_to_py(py, &scan)
}

/// `(m, R_{mλ}(k; t/m), limit, error)` for each `m`.
#[pyfunction]
#[pyo3(signature = (k, lam, t, m, nodes=40))]
fn contraction_check(
    py: Python<'_>,
    k: Vec<f64>,
    lam: Vec<u32>,
    t: Vec<f64>,
    m: Vec<u32>,
    nodes: usize,
) -> PyResult<Vec<(u32, f64, f64, f64)>> {
    let k = multiplicity_bc(k)?;
    let spec = CoreSpec::gauss_jacobi(nodes, 0.0, 0.0);
    let rows = py.detach(|| ho::contraction_check(&k, &lam, &t, &m, &spec)).map_err(to_py)?;
    Ok(rows.iter().map(|r| (r.m, r.polynomial, r.limit, r.error)).collect())
}

#[pymodule]
fn sonine_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("DomainError", py.get_type::<DomainError>())?;
    m.add("PoleError", py.get_type::<PoleError>())?;
    m.add("ConditioningError", py.get_type::<ConditioningError>())?;
    m.add("SCHEMA_VERSION", sonine::report::SCHEMA_VERSION)?;
    m.add_class::<PySpec>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyHoFamily>()?;
    m.add_class::<PyConnection>()?;
    m.add_function(wrap_pyfunction!(jack_c, m)?)?;
    m.add_function(wrap_pyfunction!(gen_pochhammer, m)?)?;
    m.add_function(wrap_pyfunction!(hyp0f1, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_b, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_1d, m)?)?;
    m.add_function(wrap_pyfunction!(dunkl_kernel_1d, m)?)?;
    m.add_function(wrap_pyfunction!(selberg_in, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_classify, m)?)?;
    m.add_function(wrap_pyfunction!(pole_set, m)?)?;
    m.add_function(wrap_pyfunction!(sonine_density, m)?)?;
    m.add_function(wrap_pyfunction!(verify_selberg, m)?)?;
    m.add_function(wrap_pyfunction!(verify_kadell, m)?)?;
    m.add_function(wrap_pyfunction!(verify_sonine_0f1, m)?)?;
    m.add_function(wrap_pyfunction!(verify_sonine_bessel_b, m)?)?;
    m.add_function(wrap_pyfunction!(probe_integrability, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(sonine_1d, m)?)?;
    m.add_function(wrap_pyfunction!(xu_intertwine, m)?)?;
    m.add_function(wrap_pyfunction!(xu_kernel_check, m)?)?;
    m.add_function(wrap_pyfunction!(jacobi_r, m)?)?;
    m.add_function(wrap_pyfunction!(jacobi_connection, m)?)?;
    m.add_function(wrap_pyfunction!(ho_polynomials, m)?)?;
    m.add_function(wrap_pyfunction!(ho_connection, m)?)?;
    m.add_function(wrap_pyfunction!(geometric_multiplicity, m)?)?;
    m.add_function(wrap_pyfunction!(sign_scan, m)?)?;
    m.add_function(wrap_pyfunction!(contraction_check, m)?)?;
    Ok(())
}
