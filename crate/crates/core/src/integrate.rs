//! Deterministic tensor quadrature and Monte-Carlo integration on the unit
//! cube and the torus.
//!
//! Gauss-Jacobi rules on `[0, 1]` for the weight `x^a (1-x)^b` are built with
//! the Golub-Welsch eigenvalue method. Reductions go through a pairwise tree
//! sum in a fixed order, so parallel evaluation does not change results.
//!
//! Random numbers come from SplitMix64 in its counter form:
//! `u64_i = mix64(seed + (i + 1) * 0x9E3779B97F4A7C15)` for `i = 0, 1, ...`,
//! consumed strictly in sample-major, axis-minor order.

use crate::error::{domain_check, Error, Result};
use crate::special::{beta, pairwise_sum, pairwise_sum_real};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use parking_lot::Mutex;
use rand::SeedableRng;
use rand_distr::{Beta, Distribution};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

/// Name of the random number generator, as recorded in reports.
pub const RNG_NAME: &str = "splitmix64-counter";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    GaussJacobiTensor,
    GaussLegendreTensor,
    TrapezoidPeriodic,
    MonteCarloBeta,
}

/// How an integral is to be approximated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrationSpec {
    pub method: Method,
    /// Nodes per axis for deterministic rules.
    pub nodes_per_axis: usize,
    /// Sample count for Monte-Carlo.
    pub samples: usize,
    pub seed: u64,
    /// Per-axis weight exponents `(a, b)` of `x^a (1-x)^b`.
    pub jacobi_exponents: Option<(f64, f64)>,
}

impl IntegrationSpec {
    pub const DEFAULT_NODES: usize = 96;
    pub const DEFAULT_SAMPLES: usize = 1 << 16;

    pub fn gauss_jacobi(nodes_per_axis: usize, a: f64, b: f64) -> Self {
        IntegrationSpec {
            method: Method::GaussJacobiTensor,
            nodes_per_axis,
            samples: 0,
            seed: 0,
            jacobi_exponents: Some((a, b)),
        }
    }

    pub fn gauss_legendre(nodes_per_axis: usize) -> Self {
        IntegrationSpec {
            method: Method::GaussLegendreTensor,
            nodes_per_axis,
            samples: 0,
            seed: 0,
            jacobi_exponents: None,
        }
    }

    pub fn trapezoid(nodes_per_axis: usize) -> Self {
        IntegrationSpec {
            method: Method::TrapezoidPeriodic,
            nodes_per_axis,
            samples: 0,
            seed: 0,
            jacobi_exponents: None,
        }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        IntegrationSpec {
            method: Method::MonteCarloBeta,
            nodes_per_axis: 0,
            samples,
            seed,
            jacobi_exponents: None,
        }
    }

    /// Same spec with the Jacobi exponents replaced.
    pub fn with_exponents(&self, a: f64, b: f64) -> Self {
        IntegrationSpec {
            jacobi_exponents: Some((a, b)),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.method {
            Method::MonteCarloBeta => domain_check(self.samples >= 1000, || {
                format!("Monte-Carlo needs at least 1000 samples, got {}", self.samples)
            }),
            _ => domain_check(self.nodes_per_axis >= 2, || {
                format!("need at least 2 nodes per axis, got {}", self.nodes_per_axis)
            }),
        }
    }
}

impl Default for IntegrationSpec {
    fn default() -> Self {
        IntegrationSpec::gauss_legendre(Self::DEFAULT_NODES)
    }
}

/// An integral estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: Complex64,
    /// `|I(N) - I(N/2)|` for deterministic rules, the standard error for
    /// Monte-Carlo.
    pub error_estimate: f64,
}

/// A one-dimensional rule on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Same rule mapped affinely onto `[lo, hi]` (weights scaled by the
    /// length; weight-function factors are *not* rescaled).
    pub fn mapped(&self, lo: f64, hi: f64) -> GaussRule {
        let len = hi - lo;
        GaussRule {
            nodes: self.nodes.iter().map(|x| lo + len * x).collect(),
            weights: self.weights.iter().map(|w| w * len).collect(),
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .collect();
        pairwise_sum_real(&terms)
    }
}

fn rule_cache() -> &'static Mutex<HashMap<(usize, u64, u64), Arc<GaussRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64, u64), Arc<GaussRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss-Jacobi rule with `n` nodes for `∫_0^1 f(x) x^a (1-x)^b dx`.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<Arc<GaussRule>> {
    domain_check(a > -1.0 && b > -1.0, || {
        format!("Jacobi exponents must exceed -1, got ({a}, {b})")
    })?;
    domain_check(n >= 1, || "a Gauss rule needs at least one node".into())?;
    let key = (n, a.to_bits(), b.to_bits());
    if let Some(r) = rule_cache().lock().get(&key) {
        return Ok(r.clone());
    }
    let rule = Arc::new(golub_welsch(n, a, b));
    rule_cache().lock().insert(key, rule.clone());
    Ok(rule)
}

pub fn gauss_legendre(n: usize) -> Result<Arc<GaussRule>> {
    gauss_jacobi(n, 0.0, 0.0)
}

fn golub_welsch(n: usize, a: f64, b: f64) -> GaussRule {
    // On [-1, 1] with y = 2x - 1 the weight is (1-y)^b (1+y)^a.
    let (al, be) = (b, a);
    let s = al + be;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (be - al) / (s + 2.0)
        } else {
            (be * be - al * al) / ((2.0 * kf + s) * (2.0 * kf + s + 2.0))
        };
        jac[(k, k)] = diag;
        if k + 1 < n {
            let j = kf + 1.0;
            let off2 = if k == 0 {
                4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + s).powi(2) * (3.0 + s))
            } else {
                4.0 * j * (j + al) * (j + be) * (j + s)
                    / ((2.0 * j + s).powi(2) * (2.0 * j + s + 1.0) * (2.0 * j + s - 1.0))
            };
            let off = off2.sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mass = beta(a + 1.0, b + 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let y = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            ((y + 1.0) / 2.0, mass * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

fn axis_rule(spec: &IntegrationSpec, nodes: usize) -> Result<Arc<GaussRule>> {
    match spec.method {
        Method::GaussLegendreTensor => gauss_legendre(nodes),
        Method::GaussJacobiTensor => {
            let (a, b) = spec.jacobi_exponents.unwrap_or((0.0, 0.0));
            gauss_jacobi(nodes, a, b)
        }
        _ => Err(Error::ParameterDomain(format!(
            "{:?} is not a tensor Gauss rule",
            spec.method
        ))),
    }
}

fn tensor_sum<F>(f: &F, n: usize, rule: &GaussRule) -> Result<Complex64>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let m = rule.nodes.len();
    let total = m.pow(n as u32);
    let terms: Vec<Result<Complex64>> = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut x = [0.0f64; 8];
            let mut w = 1.0;
            for slot in x.iter_mut().take(n) {
                let i = idx % m;
                idx /= m;
                *slot = rule.nodes[i];
                w *= rule.weights[i];
            }
            let v = f(&x[..n]);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFiniteIntegrand(format!("{:?}", &x[..n])));
            }
            Ok(v * w)
        })
        .collect();
    let terms: Vec<Complex64> = terms.into_iter().collect::<Result<_>>()?;
    Ok(pairwise_sum(&terms))
}

/// Approximates `∫_{(0,1)^n} f(x) w(x) dx`.
///
/// For `GaussJacobiTensor` the per-axis weight `x^a (1-x)^b` is absorbed
/// into the rule and `f` must be supplied without it; for
/// `GaussLegendreTensor` there is no weight. `MonteCarloBeta` samples the
/// same product weight (uniform when no exponents are given).
pub fn integrate_cube<F>(f: F, n: usize, spec: &IntegrationSpec) -> Result<Estimate>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    spec.validate()?;
    domain_check((1..=8).contains(&n), || format!("dimension {n} not supported"))?;
    match spec.method {
        Method::GaussJacobiTensor | Method::GaussLegendreTensor => {
            domain_check(n <= 3, || {
                format!("tensor rules support n <= 3, got n = {n}")
            })?;
            let fine = tensor_sum(&f, n, &*axis_rule(spec, spec.nodes_per_axis)?)?;
            let coarse_nodes = (spec.nodes_per_axis / 2).max(1);
            let coarse = tensor_sum(&f, n, &*axis_rule(spec, coarse_nodes)?)?;
            Ok(Estimate {
                value: fine,
                error_estimate: (fine - coarse).norm(),
            })
        }
        Method::MonteCarloBeta => {
            let (a, b) = spec.jacobi_exponents.unwrap_or((0.0, 0.0));
            let draws = sample_beta_product(n, a + 1.0, b + 1.0, spec.samples, spec.seed)?;
            let values: Vec<Complex64> = draws
                .par_iter()
                .map(|x| f(x))
                .collect();
            if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
                return Err(Error::NonFiniteIntegrand(format!("{:?}", draws[i])));
            }
            let count = values.len() as f64;
            let mean = pairwise_sum(&values) / count;
            let dev: Vec<f64> = values.iter().map(|v| (v - mean).norm_sqr()).collect();
            let var = pairwise_sum_real(&dev) / (count - 1.0);
            let scale = beta(a + 1.0, b + 1.0).powi(n as i32);
            Ok(Estimate {
                value: mean * scale,
                error_estimate: scale * (var / count).sqrt(),
            })
        }
        Method::TrapezoidPeriodic => Err(Error::ParameterDomain(
            "the periodic trapezoid rule integrates over the torus; use integrate_torus".into(),
        )),
    }
}

fn trapezoid_mean<F>(f: &F, n: usize, points: usize) -> Result<Complex64>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let total = points.pow(n as u32);
    let h = 2.0 * PI / points as f64;
    let terms: Vec<Result<Complex64>> = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut t = [0.0f64; 4];
            for slot in t.iter_mut().take(n) {
                *slot = (idx % points) as f64 * h;
                idx /= points;
            }
            let v = f(&t[..n]);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFiniteIntegrand(format!("{:?}", &t[..n])));
            }
            Ok(v)
        })
        .collect();
    let terms: Vec<Complex64> = terms.into_iter().collect::<Result<_>>()?;
    Ok(pairwise_sum(&terms) / total as f64)
}

/// Normalized torus integral `(2π)^{-n} ∫_{[0,2π)^n} f(t) dt` by the
/// uniform-grid trapezoid rule.
pub fn integrate_torus<F>(f: F, n: usize, spec: &IntegrationSpec) -> Result<Estimate>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    domain_check(spec.method == Method::TrapezoidPeriodic, || {
        "integrate_torus requires the TrapezoidPeriodic method".into()
    })?;
    spec.validate()?;
    domain_check((1..=2).contains(&n), || {
        format!("torus quadrature supports n <= 2, got n = {n}")
    })?;
    let fine = trapezoid_mean(&f, n, spec.nodes_per_axis)?;
    let coarse = trapezoid_mean(&f, n, (spec.nodes_per_axis / 2).max(1))?;
    Ok(Estimate {
        value: fine,
        error_estimate: (fine - coarse).norm(),
    })
}

fn sample_beta_product(n: usize, p: f64, q: f64, samples: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    domain_check(p > 0.0 && q > 0.0, || {
        format!("Beta parameters must be positive, got ({p}, {q})")
    })?;
    let dist = Beta::new(p, q).map_err(|e| Error::ParameterDomain(e.to_string()))?;
    let mut rng = SplitMix64::seed_from_u64(seed);
    Ok((0..samples)
        .map(|_| (0..n).map(|_| dist.sample(&mut rng)).collect())
        .collect())
}

/// Parameters of the Selberg weight
/// `Π x_j^{μ-κ(n-1)-1} (1-x_j)^{ν-κ(n-1)-1} Π_{i<j} |x_i - x_j|^{2κ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelbergParams {
    pub n: usize,
    pub kappa: f64,
    pub mu: Complex64,
    pub nu: Complex64,
}

impl SelbergParams {
    pub fn real(n: usize, kappa: f64, mu: f64, nu: f64) -> Self {
        SelbergParams {
            n,
            kappa,
            mu: Complex64::new(mu, 0.0),
            nu: Complex64::new(nu, 0.0),
        }
    }

    /// Per-axis Jacobi exponents `(a, b)` of the product part of the weight.
    pub fn axis_exponents(&self) -> (Complex64, Complex64) {
        let shift = self.kappa * (self.n as f64 - 1.0) + 1.0;
        (self.mu - shift, self.nu - shift)
    }

    /// The interaction factor `Π_{i<j} |x_i - x_j|^{2κ}`.
    pub fn cross_term(&self, x: &[f64]) -> f64 {
        let mut v = 1.0;
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                v *= (x[i] - x[j]).abs().powf(2.0 * self.kappa);
            }
        }
        v
    }
}

/// Importance sample for the normalized Selberg density: points drawn from
/// independent `Beta(μ-κ(n-1), ν-κ(n-1))` axes, weighted by the cross term.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSample {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

/// Self-normalized estimate with its delta-method standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: Complex64,
    pub standard_error: f64,
}

impl WeightedSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn expectation<F>(&self, f: F) -> McEstimate
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let values: Vec<Complex64> = self.points.par_iter().map(|x| f(x)).collect();
        let wsum = pairwise_sum_real(&self.weights);
        let weighted: Vec<Complex64> = values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * *w)
            .collect();
        let mean = pairwise_sum(&weighted) / wsum;
        let dev: Vec<f64> = values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * w * (v - mean).norm_sqr())
            .collect();
        McEstimate {
            mean,
            standard_error: pairwise_sum_real(&dev).sqrt() / wsum,
        }
    }
}

pub fn sample_selberg(p: &SelbergParams, samples: usize, seed: u64) -> Result<WeightedSample> {
    domain_check(p.mu.im == 0.0 && p.nu.im == 0.0, || {
        "Selberg sampling needs real mu and nu".into()
    })?;
    let shift = p.kappa * (p.n as f64 - 1.0);
    let (bp, bq) = (p.mu.re - shift, p.nu.re - shift);
    let points = sample_beta_product(p.n, bp, bq, samples, seed)?;
    let weights = points.iter().map(|x| p.cross_term(x)).collect();
    Ok(WeightedSample { points, weights })
}

/// Product rule for the ordered triangle `0 < x_2 < x_1 < 1` with weight
/// `(x_1 x_2)^a ((1-x_1)(1-x_2))^b (x_1 - x_2)^c`.
///
/// The triangle is parametrized by `s = x_1 - x_2` and `x_2 = (1-s)τ`; every
/// edge of the triangle becomes a coordinate line and the two vertices where
/// a non-edge factor vanishes are resolved by Duffy maps, so every singular
/// factor is absorbed into a one-dimensional Gauss-Jacobi weight. Integrands
/// that are smooth on the closed triangle converge spectrally.
pub fn selberg_triangle_rule(a: f64, b: f64, c: f64, nodes: usize) -> Result<Vec<([f64; 2], f64)>> {
    domain_check(a > -1.0 && b > -1.0 && c >= 0.0, || {
        format!("triangle rule needs a, b > -1 and c >= 0, got ({a}, {b}, {c})")
    })?;
    let mut out = Vec::new();
    // Maps (s, τ) to x and returns the weight factors not absorbed by the
    // caller's rule, given the list of absorbed power factors.
    let full = |s: f64, tau: f64| -> ([f64; 2], f64) {
        let x2 = (1.0 - s) * tau;
        let x1 = s + x2;
        (
            [x1, x2],
            x1.powf(a) * x2.powf(a) * (1.0 - x1).powf(b) * (1.0 - x2).powf(b) * s.powf(c) * (1.0 - s),
        )
    };

    // Piece 1: s in [1/2, 1], τ in [0, 1]; absorbs (1-s)^{a+b+1}, τ^a (1-τ)^b.
    let rs = gauss_jacobi(nodes, 0.0, a + b + 1.0)?;
    let rt = gauss_jacobi(nodes, a, b)?;
    for (&us, &ws) in rs.nodes.iter().zip(&rs.weights) {
        let s = 0.5 + 0.5 * us;
        // (1-s)^{a+b+1} = 2^{-(a+b+1)} (1-us)^{a+b+1}; ds = ds/2.
        let ws = ws * 0.5f64.powf(a + b + 2.0);
        for (&tau, &wt) in rt.nodes.iter().zip(&rt.weights) {
            let (x, full_w) = full(s, tau);
            let absorbed = (1.0 - s).powf(a + b + 1.0) * tau.powf(a) * (1.0 - tau).powf(b);
            out.push((x, ws * wt * full_w / absorbed));
        }
    }

    // Corner pieces: s in [0, 1/2]. For τ in [0, 1/2] the corner factor is
    // x_1^a; the mirrored half τ in [1/2, 1] carries (1-x_2)^b.
    for mirrored in [false, true] {
        let e = if mirrored { b } else { a };
        let to_tau = |t: f64| if mirrored { 1.0 - t } else { t };
        // Triangle D1: 0 <= t <= s <= 1/2, s = r/2, t = rθ/2.
        let rr = gauss_jacobi(nodes, c + 2.0 * e + 1.0, 0.0)?;
        let rth = gauss_jacobi(nodes, e, 0.0)?;
        for (&r, &wr) in rr.nodes.iter().zip(&rr.weights) {
            for (&th, &wth) in rth.nodes.iter().zip(&rth.weights) {
                let s = r / 2.0;
                let t = r * th / 2.0;
                let (x, full_w) = full(s, to_tau(t));
                let jac = r / 4.0;
                let absorbed = r.powf(c + 2.0 * e + 1.0) * th.powf(e);
                out.push((x, wr * wth * full_w * jac / absorbed));
            }
        }
        // Triangle D2: 0 <= s <= t <= 1/2, t = r/2, s = rθ/2.
        let rth2 = gauss_jacobi(nodes, c, 0.0)?;
        for (&r, &wr) in rr.nodes.iter().zip(&rr.weights) {
            for (&th, &wth) in rth2.nodes.iter().zip(&rth2.weights) {
                let t = r / 2.0;
                let s = r * th / 2.0;
                let (x, full_w) = full(s, to_tau(t));
                let jac = r / 4.0;
                let absorbed = r.powf(c + 2.0 * e + 1.0) * th.powf(c);
                out.push((x, wr * wth * full_w * jac / absorbed));
            }
        }
    }
    Ok(out)
}
