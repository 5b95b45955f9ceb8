//! Rank-one closed forms: the intertwiner between two multiplicities on
//! {±1}, the classical Sonine formula, and connection coefficients between
//! one-variable Jacobi families.

use crate::error::{domain_check, Error, Result};
use crate::hypergeom::{bessel_1d, dunkl_kernel_1d};
use crate::integrate::{gauss_jacobi, IntegrationSpec};
use crate::report::{Identity, VerificationReport};
use crate::special::{beta, ln_gamma_real, rising_real};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Default tolerance for rank-one identities.
pub const RANK_ONE_TOL: f64 = 1e-8;

/// Normalization `Γ(k'+1/2) / (Γ(k'-k) Γ(k+1/2))` of the intertwiner kernel.
pub fn xu_constant(k: f64, kp: f64) -> f64 {
    (ln_gamma_real(kp + 0.5).unwrap_or(f64::NAN)
        - ln_gamma_real(kp - k).unwrap_or(f64::NAN)
        - ln_gamma_real(k + 0.5).unwrap_or(f64::NAN))
    .exp()
}

/// `V_{k',k} f(x) = C ∫_{-1}^{1} f(xt) |t|^{2k} (1+t) (1-t²)^{k'-k-1} dt`.
///
/// The integral is folded onto `[0, 1]` and mapped by `u = t²`, after which
/// `u^{k-1/2} (1-u)^{k'-k-1}` is a Gauss-Jacobi weight.
pub fn xu_intertwine_complex<F>(f: F, k: f64, kp: f64, x: f64, spec: &IntegrationSpec) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    domain_check(k >= 0.0 && kp > k, || format!("need k' > k >= 0, got k = {k}, k' = {kp}"))?;
    domain_check(spec.nodes_per_axis >= 2, || "at least two nodes required".into())?;
    let rule = gauss_jacobi(spec.nodes_per_axis, k - 0.5, kp - k - 1.0)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        let t = u.sqrt();
        let (p, m) = (f(x * t), f(-x * t));
        if !(p.re.is_finite() && p.im.is_finite() && m.re.is_finite() && m.im.is_finite()) {
            return Err(Error::NonFiniteIntegrand(format!("t = ±{t}")));
        }
        acc += w * ((p + m) + t * (p - m));
    }
    Ok(acc * 0.5 * xu_constant(k, kp))
}

pub fn xu_intertwine<F>(f: F, k: f64, kp: f64, x: f64, spec: &IntegrationSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    Ok(xu_intertwine_complex(|t| Complex64::new(f(t), 0.0), k, kp, x, spec)?.re)
}

/// Eigenvalues of the intertwiner on monomials: `V t^m = v_m x^m`.
pub fn xu_monomial_factors(k: f64, kp: f64, degree: usize) -> Vec<f64> {
    let mut v = vec![1.0; degree + 1];
    for m in 1..=degree {
        let odd = m % 2 == 1;
        let num = m as f64 + if odd { 2.0 * k } else { 0.0 };
        let den = m as f64 + if odd { 2.0 * kp } else { 0.0 };
        v[m] = v[m - 1] * num / den;
    }
    v
}

/// `V_{k',k} E_k(·, z)(x)` against `E_{k'}(x, z)`.
pub fn xu_kernel_check(
    k: f64,
    kp: f64,
    x: f64,
    z: Complex64,
    spec: &IntegrationSpec,
    tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let lhs = dunkl_kernel_1d(kp, x, z)?;
    let rhs = xu_intertwine_complex(|t| dunkl_kernel_1d(k, t, z).unwrap_or(Complex64::new(f64::NAN, 0.0)), k, kp, x, spec)?;
    let params = serde_json::json!({ "k": k, "kp": kp, "x": x, "z": [z.re, z.im] });
    Ok(VerificationReport::new(Identity::XuIntertwiner, params, lhs, rhs, tolerance, Some(spec.clone()))
        .with_runtime(start))
}

/// Compares `j_{a+b}(z)` with
/// `2Γ(a+b+1)/(Γ(a+1)Γ(b)) ∫_0^1 j_a(zx) x^{2a+1} (1-x²)^{b-1} dx`.
pub fn sonine_1d(a: f64, b: f64, z: Complex64, spec: &IntegrationSpec) -> Result<VerificationReport> {
    sonine_1d_with_tol(a, b, z, spec, RANK_ONE_TOL)
}

pub fn sonine_1d_with_tol(
    a: f64,
    b: f64,
    z: Complex64,
    spec: &IntegrationSpec,
    tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    domain_check(a > -1.0 && b > 0.0, || format!("need a > -1 and b > 0, got ({a}, {b})"))?;
    let lhs = bessel_1d(a + b, z)?;
    // u = x²: x^{2a+1} dx = u^a du / 2.
    let rule = gauss_jacobi(spec.nodes_per_axis, a, b - 1.0)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        acc += w * bessel_1d(a, z * u.sqrt())?;
    }
    let rhs = acc / beta(a + 1.0, b);
    let params = serde_json::json!({ "a": a, "b": b, "z": [z.re, z.im] });
    Ok(VerificationReport::new(Identity::ClassicalSonine, params, lhs, rhs, tolerance, Some(spec.clone()))
        .with_runtime(start))
}

/// Parameters of `R_n^{(α,β)}`, normalized by `R_n(1) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams {
    pub a: f64,
    pub b: f64,
    pub degree: usize,
}

impl JacobiParams {
    pub fn new(a: f64, b: f64, degree: usize) -> Result<Self> {
        domain_check(a > -1.0 && b > -1.0, || format!("need a, b > -1, got ({a}, {b})"))?;
        Ok(JacobiParams { a, b, degree })
    }
}

/// `R_0, ..., R_{max_degree}` at `x`, by the three-term recurrence for the
/// classical `P_n^{(α,β)}` rescaled by `P_n(1) = (α+1)_n / n!`.
pub fn jacobi_r_all(a: f64, b: f64, max_degree: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_degree + 1);
    out.push(1.0);
    if max_degree == 0 {
        return out;
    }
    // Work with R directly: P_n = p1_n R_n where p1_n = P_n(1).
    let mut p1 = vec![1.0; max_degree + 1];
    for n in 1..=max_degree {
        p1[n] = p1[n - 1] * (n as f64 + a) / n as f64;
    }
    let r1 = ((a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0) / (a + 1.0);
    out.push(r1);
    for n in 2..=max_degree {
        let nf = n as f64;
        let s = 2.0 * nf + a + b;
        let c0 = 2.0 * nf * (nf + a + b) * (s - 2.0);
        let c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let c2 = 2.0 * (nf + a - 1.0) * (nf + b - 1.0) * s;
        let p = (c1 * out[n - 1] * p1[n - 1] - c2 * out[n - 2] * p1[n - 2]) / c0;
        out.push(p / p1[n]);
    }
    out
}

/// `R_n^{(α,β)}(x)`; exact 1 at `x = 1`.
pub fn jacobi_r(p: &JacobiParams, x: f64) -> Result<f64> {
    domain_check(p.a > -1.0 && p.b > -1.0, || format!("need a, b > -1, got ({}, {})", p.a, p.b))?;
    if x == 1.0 {
        return Ok(1.0);
    }
    Ok(jacobi_r_all(p.a, p.b, p.degree, x)[p.degree])
}

/// The terminating series `₂F₁(-n, n+α+β+1; α+1; (1-x)/2)`. Suffers
/// cancellation for large degree away from `x = 1`.
pub fn jacobi_r_series(p: &JacobiParams, x: f64) -> f64 {
    let n = p.degree as u32;
    let y = (1.0 - x) / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 0..n {
        let jf = j as f64;
        term *= (jf - n as f64) * (n as f64 + p.a + p.b + 1.0 + jf) / ((p.a + 1.0 + jf) * (jf + 1.0)) * y;
        sum += term;
    }
    sum
}

/// `R_n^{(a_dst, β)} = Σ_{j ≤ n} c_{n,j} R_j^{(a_src, β)}` for `n ≤ max_degree`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiConnection {
    pub a_src: f64,
    pub b: f64,
    pub a_dst: f64,
    /// Row `n` holds `c_{n,0}, ..., c_{n,n}`.
    pub coefficients: Vec<Vec<f64>>,
    /// Maximum collocation residual per row.
    pub residuals: Vec<f64>,
}

/// Residual above which a connection solve is rejected.
pub const CONNECTION_RESIDUAL_LIMIT: f64 = 1e-8;

/// Largest supported degree.
pub const MAX_CONNECTION_DEGREE: usize = 30;

impl JacobiConnection {
    pub fn row_sums(&self) -> Vec<f64> {
        self.coefficients.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn min_coefficient(&self) -> f64 {
        self.coefficients
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Long-format CSV: `n,j,coefficient`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "j", "coefficient"]).expect("in-memory write");
        for (n, row) in self.coefficients.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                w.write_record([n.to_string(), j.to_string(), format!("{c:e}")])
                    .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

/// Chebyshev points of the first kind on [-1, 1].
pub fn chebyshev_grid(count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| (std::f64::consts::PI * (i as f64 + 0.5) / count as f64).cos())
        .collect()
}

pub fn jacobi_connection(a_src: f64, b: f64, a_dst: f64, max_degree: usize) -> Result<JacobiConnection> {
    domain_check(a_src > -1.0 && a_dst > -1.0 && b > -1.0, || {
        format!("need a_src, a_dst, b > -1, got ({a_src}, {a_dst}, {b})")
    })?;
    domain_check(max_degree <= MAX_CONNECTION_DEGREE, || {
        format!("max_degree must be <= {MAX_CONNECTION_DEGREE}, got {max_degree}")
    })?;
    let grid = chebyshev_grid(2 * (max_degree + 1) + 8);
    let src: Vec<Vec<f64>> = grid.iter().map(|&x| jacobi_r_all(a_src, b, max_degree, x)).collect();
    let dst: Vec<Vec<f64>> = grid.iter().map(|&x| jacobi_r_all(a_dst, b, max_degree, x)).collect();
    let mut coefficients = Vec::with_capacity(max_degree + 1);
    let mut residuals = Vec::with_capacity(max_degree + 1);
    for n in 0..=max_degree {
        let a = DMatrix::from_fn(grid.len(), n + 1, |i, j| src[i][j]);
        let y = DVector::from_fn(grid.len(), |i, _| dst[i][n]);
        let svd = a.clone().svd(true, true);
        let c = svd
            .solve(&y, 1e-14)
            .map_err(|e| Error::IllConditioned(format!("degree {n}: {e}")))?;
        let residual = (&a * &c - &y).amax();
        if residual > CONNECTION_RESIDUAL_LIMIT {
            return Err(Error::IllConditioned(format!(
                "degree {n}: collocation residual {residual:e}"
            )));
        }
        coefficients.push(c.iter().copied().collect());
        residuals.push(residual);
    }
    Ok(JacobiConnection {
        a_src,
        b,
        a_dst,
        coefficients,
        residuals,
    })
}

/// `R_n^{(α,β)}(x)` with `x = 1` giving 1 and `R_n` at -1 from the closed
/// form `(-1)^n (β+1)_n / (α+1)_n`.
pub fn jacobi_r_at_minus_one(a: f64, b: f64, n: usize) -> f64 {
    let s = if n % 2 == 0 { 1.0 } else { -1.0 };
    s * rising_real(b + 1.0, n as u32) / rising_real(a + 1.0, n as u32)
}
