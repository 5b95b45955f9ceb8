//! Numerical checks of the Selberg, Kadell and Sonine identities, and the
//! boundary-integrability probe behind the Σ(k₂) classification.

use crate::error::{domain_check, Error, Result};
use crate::hypergeom::{BesselB, Hyp0F1Series, MultiplicityB, DEFAULT_MAX_WEIGHT};
use crate::integrate::{
    gauss_legendre, integrate_cube, sample_selberg, IntegrationSpec, McEstimate, Method, SelbergParams,
};
use crate::jack::{gen_pochhammer, global_cache, Partition};
use crate::report::{Identity, VerificationReport};
use crate::selberg::{pole_set, selberg_in, sigma_classify, SigmaVerdict, SonineDensity};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Tolerance for one-variable identities, where Gauss-Jacobi absorbs the
/// whole weight.
pub const TOL_RANK_ONE: f64 = 1e-8;

/// Tolerance for identities whose weight has a Hölder cross term.
pub const TOL_CROSS_TERM: f64 = 1e-3;

/// Largest partition weight accepted by the Kadell check.
pub const MAX_KADELL_WEIGHT: u32 = 6;

/// Series truncation used for one-variable integrands.
pub const RANK_ONE_SERIES_WEIGHT: u32 = 40;

pub fn default_tolerance(n: usize) -> f64 {
    if n == 1 {
        TOL_RANK_ONE
    } else {
        TOL_CROSS_TERM
    }
}

fn series_weight(n: usize) -> u32 {
    if n == 1 {
        RANK_ONE_SERIES_WEIGHT
    } else {
        DEFAULT_MAX_WEIGHT
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn check_selberg_domain(alpha: f64, mu: f64, nu: f64, n: usize) -> Result<()> {
    domain_check(alpha > 0.0, || format!("alpha must be positive, got {alpha}"))?;
    domain_check((1..=3).contains(&n), || format!("n must lie in 1..=3, got {n}"))?;
    let floor = (n as f64 - 1.0) / alpha;
    domain_check(mu > floor && nu > floor, || {
        format!("need mu, nu > (n-1)/alpha = {floor}, got mu = {mu}, nu = {nu}")
    })
}

/// `E[g]` under the normalized Selberg density by tensor Gauss-Jacobi, with
/// the normalizing mass computed by the same rule.
fn selberg_expectation<G>(p: &SelbergParams, g: G, spec: &IntegrationSpec) -> Result<(Complex64, f64)>
where
    G: Fn(&[f64]) -> Complex64 + Sync,
{
    let (a, b) = p.axis_exponents();
    let spec = IntegrationSpec {
        method: Method::GaussJacobiTensor,
        jacobi_exponents: Some((a.re, b.re)),
        ..spec.clone()
    };
    let mass = integrate_cube(|x| c(p.cross_term(x)), p.n, &spec)?;
    let num = integrate_cube(|x| g(x) * p.cross_term(x), p.n, &spec)?;
    let value = num.value / mass.value;
    let err = (num.error_estimate + mass.error_estimate * value.norm()) / mass.value.norm();
    Ok((value, err))
}

/// Self-normalized importance-sampling estimate of `E[g]`.
fn selberg_monte_carlo<G>(p: &SelbergParams, g: G, samples: usize, seed: u64) -> Result<McEstimate>
where
    G: Fn(&[f64]) -> Complex64 + Sync,
{
    Ok(sample_selberg(p, samples, seed)?.expectation(g))
}

fn expectation_by_spec<G>(p: &SelbergParams, g: G, spec: &IntegrationSpec) -> Result<(Complex64, String)>
where
    G: Fn(&[f64]) -> Complex64 + Sync,
{
    spec.validate()?;
    match spec.method {
        Method::MonteCarloBeta => {
            let e = selberg_monte_carlo(p, g, spec.samples, spec.seed)?;
            Ok((e.mean, format!("monte carlo standard error {:e}", e.standard_error)))
        }
        Method::GaussJacobiTensor | Method::GaussLegendreTensor => {
            let (v, err) = selberg_expectation(p, g, spec)?;
            Ok((v, format!("quadrature error estimate {err:e}")))
        }
        Method::TrapezoidPeriodic => Err(Error::ParameterDomain(
            "cube integrals need a Gauss or Monte-Carlo method".into(),
        )),
    }
}

fn jack_ratio(lam: &Partition, alpha: f64, n: usize) -> impl Fn(&[f64]) -> Complex64 + Sync {
    let table = global_cache().table(alpha, lam.weight(), n);
    let idx = table.index_of(lam).expect("partition fits in n parts");
    move |x: &[f64]| {
        let xc: Vec<Complex64> = x.iter().map(|&v| c(v)).collect();
        table.eval_all(&xc)[idx] / table.at_one[idx]
    }
}

/// Closed form against tensor quadrature of the Selberg integral.
pub fn verify_selberg(p: &SelbergParams, spec: &IntegrationSpec, tolerance: Option<f64>) -> Result<VerificationReport> {
    let start = Instant::now();
    domain_check(p.mu.im == 0.0 && p.nu.im == 0.0, || "quadrature needs real mu and nu".into())?;
    let closed = selberg_in(p)?;
    let (a, b) = p.axis_exponents();
    let spec = IntegrationSpec {
        method: Method::GaussJacobiTensor,
        jacobi_exponents: Some((a.re, b.re)),
        ..spec.clone()
    };
    let quad = integrate_cube(|x| c(p.cross_term(x)), p.n, &spec)?;
    let tol = tolerance.unwrap_or(default_tolerance(p.n));
    let params = serde_json::json!({"n": p.n, "kappa": p.kappa, "mu": p.mu.re, "nu": p.nu.re});
    let mut r = VerificationReport::new(Identity::SelbergClosedForm, params, closed.value, quad.value, tol, Some(spec))
        .with_note(format!("quadrature error estimate {:e}", quad.error_estimate));
    if closed.near_pole {
        r = r.with_note("closed form evaluated near a pole");
    }
    Ok(r.with_runtime(start))
}

/// `∫ C_λ(x)/C_λ(1) s_{μ,ν}(x) dx = (μ)_λ / (μ+ν)_λ` with `κ = 1/α`.
pub fn verify_kadell(
    alpha: f64,
    mu: f64,
    nu: f64,
    lam: &Partition,
    n: usize,
    spec: &IntegrationSpec,
    tolerance: Option<f64>,
) -> Result<VerificationReport> {
    let start = Instant::now();
    check_selberg_domain(alpha, mu, nu, n)?;
    domain_check(lam.weight() <= MAX_KADELL_WEIGHT, || {
        format!("|lambda| must be <= {MAX_KADELL_WEIGHT}, got {}", lam.weight())
    })?;
    domain_check(lam.len() <= n, || format!("partition {lam} has more than {n} parts"))?;
    let p = SelbergParams::real(n, 1.0 / alpha, mu, nu);
    let (lhs, note) = expectation_by_spec(&p, jack_ratio(lam, alpha, n), spec)?;
    let rhs = gen_pochhammer(c(mu), lam, alpha) / gen_pochhammer(c(mu + nu), lam, alpha);
    let tol = tolerance.unwrap_or(default_tolerance(n));
    let params = serde_json::json!({
        "alpha": alpha, "mu": mu, "nu": nu, "lambda": lam.parts(), "n": n
    });
    Ok(VerificationReport::new(Identity::Kadell, params, lhs, rhs, tol, Some(spec.clone()))
        .with_note(note)
        .with_runtime(start))
}

/// Importance-sampling estimate of the Kadell integral.
pub fn kadell_monte_carlo(
    alpha: f64,
    mu: f64,
    nu: f64,
    lam: &Partition,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_selberg_domain(alpha, mu, nu, n)?;
    domain_check(lam.len() <= n, || format!("partition {lam} has more than {n} parts"))?;
    let p = SelbergParams::real(n, 1.0 / alpha, mu, nu);
    selberg_monte_carlo(&p, jack_ratio(lam, alpha, n), samples, seed)
}

/// `₀F₁^α(μ+ν; z, 1) = ∫ ₀F₁^α(μ; z, x) s_{μ,ν}(x) dx` with `κ = 1/α`.
pub fn verify_sonine_0f1(
    alpha: f64,
    mu: f64,
    nu: f64,
    z: &[Complex64],
    spec: &IntegrationSpec,
    tolerance: Option<f64>,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let n = z.len();
    check_selberg_domain(alpha, mu, nu, n)?;
    let m = series_weight(n);
    let ones = vec![c(1.0); n];
    let lhs_series = Hyp0F1Series::new(alpha, c(mu + nu), z, m)?.eval(&ones)?;
    let inner = Hyp0F1Series::new(alpha, c(mu), z, m)?;
    let p = SelbergParams::real(n, 1.0 / alpha, mu, nu);
    let g = |x: &[f64]| inner.eval_real(x).map(|v| v.value).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let (rhs, note) = expectation_by_spec(&p, g, spec)?;
    let tol = tolerance.unwrap_or(default_tolerance(n));
    let zs: Vec<[f64; 2]> = z.iter().map(|v| [v.re, v.im]).collect();
    let params = serde_json::json!({"alpha": alpha, "mu": mu, "nu": nu, "z": zs, "max_weight": m});
    let mut r = VerificationReport::new(Identity::Sonine0F1, params, lhs_series.value, rhs, tol, Some(spec.clone()))
        .with_note(note)
        .with_note(format!("series last shell {:e}", lhs_series.last_shell));
    if lhs_series.diverging {
        r = r.with_note("series shells still growing at the truncation weight");
    }
    Ok(r.with_runtime(start))
}

/// `J^B_{k'}(ξ, 1) = ∫_{(0,1)^n} J^B_k(ξ, x) f_{k,h}(x) dx` with `k' = (k₁+h, k₂)`.
pub fn verify_sonine_bessel_b(
    k: &MultiplicityB,
    h: f64,
    xi: &[f64],
    spec: &IntegrationSpec,
    tolerance: Option<f64>,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let n = xi.len();
    domain_check((1..=3).contains(&n), || format!("n must lie in 1..=3, got {n}"))?;
    domain_check(k.k1.im == 0.0, || "the density check needs real k1".into())?;
    domain_check(h > k.k2 * (n as f64 - 1.0), || {
        format!("need h > k2 (n-1) = {}, got {h}", k.k2 * (n as f64 - 1.0))
    })?;
    let m = series_weight(n);
    let xic: Vec<Complex64> = xi.iter().map(|&v| c(v)).collect();
    let kp = k.shifted(c(h));
    let lhs = BesselB::new(&kp, &xic, m)?.eval_real(&vec![1.0; n])?;
    let inner = BesselB::new(k, &xic, m)?;
    let density = SonineDensity::new(*k, c(h), n)?;
    let e = density.boundary_exponent().re;
    let k1 = k.k1.re;
    let (rhs, note) = match spec.method {
        Method::GaussJacobiTensor | Method::GaussLegendreTensor => {
            // Absorb x^{2k₁} (1-x)^e per axis; (1+x)^e stays in the integrand.
            let s = IntegrationSpec {
                method: Method::GaussJacobiTensor,
                jacobi_exponents: Some((2.0 * k1, e)),
                ..spec.clone()
            };
            let f = |x: &[f64]| {
                let absorbed: f64 = x.iter().map(|v| v.powf(2.0 * k1) * (1.0 - v).powf(e)).product();
                let j = inner.eval_real(x).map(|v| v.value).unwrap_or(Complex64::new(f64::NAN, 0.0));
                j * density.eval_unchecked(x) / absorbed
            };
            let est = integrate_cube(f, n, &s)?;
            (est.value, format!("quadrature error estimate {:e}", est.error_estimate))
        }
        Method::MonteCarloBeta => {
            // u = x² maps the density onto the Selberg density.
            spec.validate()?;
            let p = density.selberg_params();
            let g = |u: &[f64]| {
                let x: Vec<f64> = u.iter().map(|v| v.sqrt()).collect();
                inner.eval_real(&x).map(|v| v.value).unwrap_or(Complex64::new(f64::NAN, 0.0))
            };
            let est = selberg_monte_carlo(&p, g, spec.samples, spec.seed)?;
            (est.mean, format!("monte carlo standard error {:e}", est.standard_error))
        }
        Method::TrapezoidPeriodic => {
            return Err(Error::ParameterDomain("cube integrals need a Gauss or Monte-Carlo method".into()))
        }
    };
    let tol = tolerance.unwrap_or(default_tolerance(n));
    let params = serde_json::json!({"k1": k1, "k2": k.k2, "h": h, "xi": xi, "max_weight": m});
    let mut r = VerificationReport::new(Identity::SonineBesselB, params, lhs.value, rhs, tol, Some(spec.clone()))
        .with_note(note);
    if lhs.diverging {
        r = r.with_note("series shells still growing at the truncation weight");
    }
    Ok(r.with_runtime(start))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeVerdict {
    Convergent,
    Divergent,
    Inconclusive,
}

/// Masses of the unnormalized density over the layers `1 - x₁ ∈ (ε, 2ε)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub layer_integrals: Vec<(f64, f64)>,
    pub verdict: ProbeVerdict,
    pub fitted_exponent: f64,
    /// `Re h - k₂(n-1) - 1`.
    pub expected_exponent: f64,
    /// `(j, m)` when `h = j k₂ - m` is a pole of the normalizing integral;
    /// the normalized density then vanishes identically.
    pub pole: Option<(usize, u64)>,
}

/// Growth factor across the last three layers that decides a verdict.
pub const PROBE_RATIO: f64 = 1.5;

/// Number of innermost layers entering the exponent fit.
pub const PROBE_FIT_LAYERS: usize = 4;

/// First dyadic layer index.
pub const PROBE_FIRST_LAYER: u32 = 3;

/// Probes local integrability of `f_{k,h}` at the face `x₁ = 1`.
///
/// The normalizing constant does not affect integrability and is left out,
/// so the probe is also meaningful at poles of the normalization.
pub fn probe_integrability(k: &MultiplicityB, h: Complex64, n: usize, layers: u32) -> Result<ProbeResult> {
    domain_check((1..=3).contains(&n), || format!("n must lie in 1..=3, got {n}"))?;
    domain_check(layers >= 6, || format!("at least 6 layers required, got {layers}"))?;
    let e = h - k.k2 * (n as f64 - 1.0) - 1.0;
    let weight = |x: &[f64]| -> f64 {
        let mut ln = Complex64::new(0.0, 0.0);
        for &v in x {
            let sq = v * v;
            ln += k.k1 * sq.ln() + e * (1.0 - sq).ln();
        }
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                ln += 2.0 * k.k2 * (x[i] * x[i] - x[j] * x[j]).abs().ln();
            }
        }
        ln.exp().norm()
    };
    let radial = gauss_legendre(16)?;
    let interior = gauss_legendre(12)?;
    let others = n - 1;
    let grid_len = interior.nodes.len().pow(others as u32);
    let mut layer_integrals = Vec::with_capacity(layers as usize + 1);
    for j in PROBE_FIRST_LAYER..=PROBE_FIRST_LAYER + layers {
        let eps = 0.5f64.powi(j as i32);
        let mut total = 0.0;
        for (&u, &wu) in radial.nodes.iter().zip(&radial.weights) {
            let s = eps * (1.0 + u);
            let mut x = vec![1.0 - s; n];
            for g in 0..grid_len {
                let mut idx = g;
                let mut wg = 1.0;
                for slot in x.iter_mut().skip(1) {
                    let q = idx % interior.nodes.len();
                    idx /= interior.nodes.len();
                    *slot = interior.nodes[q];
                    wg *= interior.weights[q];
                }
                total += wu * eps * wg * weight(&x);
            }
        }
        layer_integrals.push((eps, total));
    }
    let logs: Vec<(f64, f64)> = layer_integrals[layer_integrals.len() - PROBE_FIT_LAYERS..]
        .iter()
        .map(|&(e, v)| (e.ln(), v.ln()))
        .collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / logs.len() as f64;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / logs.len() as f64;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let fitted_exponent = sxy / sxx - 1.0;
    let l = layer_integrals.len();
    let (a, b, c3) = (layer_integrals[l - 3].1, layer_integrals[l - 2].1, layer_integrals[l - 1].1);
    let verdict = if c3 >= PROBE_RATIO * a && b > a && c3 > b && fitted_exponent <= -1.0 {
        ProbeVerdict::Divergent
    } else if a >= PROBE_RATIO * c3 && b < a && c3 < b {
        ProbeVerdict::Convergent
    } else {
        ProbeVerdict::Inconclusive
    };
    let pole = match sigma_classify(h, k.k2, n) {
        SigmaVerdict::DiscretePart { j, m } => Some((j, m)),
        _ => None,
    };
    Ok(ProbeResult {
        layer_integrals,
        verdict,
        fitted_exponent,
        expected_exponent: e.re,
        pole,
    })
}

/// Combined Σ-membership, pole status, probe and conclusion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub k: MultiplicityB,
    pub h: Complex64,
    pub n: usize,
    pub sigma: SigmaVerdict,
    pub is_pole: bool,
    /// Poles of the normalizing integral in `[Re h - 1, Re h + 1]`.
    pub nearby_poles: Vec<f64>,
    pub probe: ProbeResult,
    pub positive_measure_possible: bool,
    pub conclusion: String,
}

pub fn classify_and_report(k: &MultiplicityB, h: Complex64, n: usize) -> Result<Classification> {
    domain_check((1..=3).contains(&n), || format!("n must lie in 1..=3, got {n}"))?;
    let sigma = sigma_classify(h, k.k2, n);
    let probe = probe_integrability(k, h, n, 8)?;
    let nearby_poles = pole_set(k.k2, n, h.re - 1.0, h.re + 1.0)?;
    let is_pole = probe.pole.is_some();
    let real_k1 = k.k1.im == 0.0;
    let (possible, conclusion) = if h.im != 0.0 && real_k1 {
        (
            false,
            "h is not real: with real k1 a positive Sonine measure forces real h, so none exists".to_string(),
        )
    } else {
        match sigma {
            SigmaVerdict::ContinuousPart => (
                true,
                "ContinuousPart: the Sonine formula holds with the positive density f_{k,h}".to_string(),
            ),
            SigmaVerdict::DiscretePart { j, m } => (
                true,
                format!(
                    "DiscretePart (j = {j}, m = {m}): h is a pole of the normalization, the density \
                     representation degenerates and positivity is not decided here"
                ),
            ),
            SigmaVerdict::Outside => (
                false,
                "Outside Sigma: no positive Sonine measure exists, so the intertwiner is not positive".to_string(),
            ),
        }
    };
    Ok(Classification {
        k: *k,
        h,
        n,
        sigma,
        is_pole,
        nearby_poles,
        probe,
        positive_measure_possible: possible,
        conclusion,
    })
}
