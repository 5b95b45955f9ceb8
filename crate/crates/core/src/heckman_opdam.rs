//! Heckman-Opdam polynomials of type BC_n for n ≤ 2, connection
//! coefficients between two multiplicities, and the rational limit.
//!
//! Inner products live on the torus with weight
//! `δ_k(t) = Π_{α>0} |sin(⟨α,t⟩/2)|^{2k_α}`. Under `y_i = (1 - cos t_i)/2` a
//! W-invariant integrand becomes a polynomial against the Selberg-type
//! weight `Π y_i^{k₁+k₂-1/2} (1-y_i)^{k₂-1/2} |y₁ - y₂|^{2k₃}`, which the
//! Gauss-Jacobi and triangle rules integrate to near machine precision.

use crate::error::{domain_check, Error, Result};
use crate::hypergeom::{bessel_1d, bessel_b, MultiplicityB, DEFAULT_MAX_WEIGHT};
use crate::integrate::{gauss_jacobi, integrate_torus, selberg_triangle_rule, IntegrationSpec, Method};
use crate::jack::partial_sums_dominate;
use crate::selberg::{sigma_classify, SigmaVerdict};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest Gram condition number accepted.
pub const MAX_CONDITION: f64 = 1e12;

/// Largest degree at rank one.
pub const MAX_DEGREE_RANK_ONE: u32 = 40;

/// Largest part of a weight at rank two.
pub const MAX_PART_RANK_TWO: u32 = 12;

/// Multiplicity `(k₁, k₂, k₃)` on `e_i`, `2e_i`, `e_i ± e_j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityBC {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl MultiplicityBC {
    pub fn new(k1: f64, k2: f64, k3: f64) -> Result<Self> {
        domain_check(k1 >= 0.0 && k2 >= 0.0 && k3 >= 0.0, || {
            format!("multiplicities must be >= 0, got ({k1}, {k2}, {k3})")
        })?;
        Ok(MultiplicityBC { k1, k2, k3 })
    }

    pub fn rank_one(k1: f64, k2: f64) -> Result<Self> {
        MultiplicityBC::new(k1, k2, 0.0)
    }

    /// Jacobi parameters `(α, β) = (k₁+k₂-1/2, k₂-1/2)` of the rank-one weight.
    pub fn jacobi_parameters(&self) -> (f64, f64) {
        (self.k1 + self.k2 - 0.5, self.k2 - 0.5)
    }

    /// Multiplicity `(k₁+k₂, k₃)` of the rational limit.
    pub fn contracted(&self) -> (f64, f64) {
        (self.k1 + self.k2, self.k3)
    }

    /// `ρ(k) = Σ_i (k₁/2 + k₂ + k₃(n-i)) e_i`.
    pub fn rho(&self, n: usize) -> Vec<f64> {
        (1..=n)
            .map(|i| self.k1 / 2.0 + self.k2 + self.k3 * (n - i) as f64)
            .collect()
    }

    /// `δ_k(t)` for `n ≤ 2`.
    pub fn weight(&self, t: &[f64]) -> f64 {
        let s = |x: f64, e: f64| (x / 2.0).sin().abs().powf(2.0 * e);
        let mut w = 1.0;
        for &ti in t {
            w *= s(ti, self.k1) * s(2.0 * ti, self.k2);
        }
        if t.len() == 2 {
            w *= s(t[0] - t[1], self.k3) * s(t[0] + t[1], self.k3);
        }
        w
    }
}

/// Multiplicity attached to the Grassmannian of `n`-planes in `F^m`,
/// `d = dim_R F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometricMultiplicity {
    pub d: u32,
    pub m: u32,
    pub n: u32,
}

impl GeometricMultiplicity {
    pub fn new(d: u32, m: u32, n: u32) -> Result<Self> {
        domain_check(matches!(d, 1 | 2 | 4), || format!("d must be 1, 2 or 4, got {d}"))?;
        domain_check(m > n, || format!("need m > n, got m = {m}, n = {n}"))?;
        Ok(GeometricMultiplicity { d, m, n })
    }

    /// `k_m = (d(m-n)/2, (d-1)/2, d/2)`.
    pub fn multiplicity(&self) -> MultiplicityBC {
        let d = self.d as f64;
        MultiplicityBC {
            k1: d * (self.m - self.n) as f64 / 2.0,
            k2: (d - 1.0) / 2.0,
            k3: d / 2.0,
        }
    }
}

/// `μ ≤ λ` in the dominance order of BC_n.
pub fn dominance_le(mu: &[u32], lam: &[u32]) -> bool {
    partial_sums_dominate(lam, mu)
}

fn order_key(w: &[u32]) -> (u32, Vec<u32>) {
    (w.iter().sum(), w.to_vec())
}

/// Sorts weights by total degree, then lexicographically ascending; a
/// linear extension of dominance.
pub fn sort_weights(weights: &mut [Vec<u32>]) {
    weights.sort_by_key(|w| order_key(w));
}

fn check_rank(n: usize) -> Result<()> {
    domain_check((1..=2).contains(&n), || format!("rank must be 1 or 2, got {n}"))
}

fn check_weight(lam: &[u32], n: usize) -> Result<()> {
    domain_check(lam.len() == n, || format!("weight {lam:?} has wrong length for n = {n}"))?;
    domain_check(lam.windows(2).all(|w| w[0] >= w[1]), || format!("weight {lam:?} is not dominant"))
}

/// Dominant weights with `|λ| ≤ cutoff`, in the fixed total order.
pub fn weights_upto(n: usize, cutoff: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if n == 1 {
        out.extend((0..=cutoff).map(|m| vec![m]));
    } else {
        for a in 0..=cutoff {
            for b in 0..=a.min(cutoff - a) {
                out.push(vec![a, b]);
            }
        }
    }
    sort_weights(&mut out);
    out
}

/// Dominant weights `ν ≤ λ`, in the fixed total order.
pub fn weights_below(lam: &[u32]) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if lam.len() == 1 {
        out.extend((0..=lam[0]).map(|m| vec![m]));
    } else {
        let total = lam[0] + lam[1];
        for a in 0..=lam[0] {
            for b in 0..=a.min(total - a) {
                out.push(vec![a, b]);
            }
        }
    }
    sort_weights(&mut out);
    out
}

/// Distinct elements of the hyperoctahedral orbit of `λ`.
pub fn orbit(lam: &[u32]) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    let n = lam.len();
    let perms: Vec<Vec<usize>> = if n == 2 { vec![vec![0, 1], vec![1, 0]] } else { vec![vec![0]] };
    for p in &perms {
        for signs in 0..(1u32 << n) {
            let v: Vec<i64> = (0..n)
                .map(|i| {
                    let s = if signs >> i & 1 == 1 { -1 } else { 1 };
                    s * lam[p[i]] as i64
                })
                .collect();
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out
}

/// `M_λ(t) = Σ_{μ ∈ Wλ} e^{i⟨μ,t⟩}`, which is real.
pub fn orbit_sum(lam: &[u32], t: &[f64]) -> Result<f64> {
    check_rank(lam.len())?;
    check_weight(lam, t.len())?;
    Ok(orbit(lam)
        .iter()
        .map(|mu| mu.iter().zip(t).map(|(&m, &x)| m as f64 * x).sum::<f64>().cos())
        .sum())
}

fn orbit_sum_unchecked(lam: &[u32], cos_multiples: &[Vec<f64>]) -> f64 {
    // cos_multiples[i][m] = cos(m t_i); M_λ is a sum of products of cosines.
    if lam.len() == 1 {
        return if lam[0] == 0 { 1.0 } else { 2.0 * cos_multiples[0][lam[0] as usize] };
    }
    let (a, b) = (lam[0] as usize, lam[1] as usize);
    let c = |i: usize, m: usize| cos_multiples[i][m];
    // Σ over signs of cos(±a t1 ± b t2) = 4 cos(a t1) cos(b t2) when a, b > 0.
    let pair = |x: usize, y: usize| -> f64 {
        let mult = match (x > 0, y > 0) {
            (true, true) => 4.0,
            (false, false) => 1.0,
            _ => 2.0,
        };
        mult * c(0, x) * c(1, y)
    };
    if a == b {
        pair(a, a)
    } else {
        pair(a, b) + pair(b, a)
    }
}

/// Orbit size `M_λ(0)`.
pub fn orbit_size(lam: &[u32]) -> usize {
    orbit(lam).len()
}

/// A W-invariant trigonometric polynomial in the orbit-sum basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    pub n: usize,
    /// The leading weight.
    pub weight: Vec<u32>,
    /// `(ν, c_ν)` with `ν` in the fixed total order.
    pub terms: Vec<(Vec<u32>, f64)>,
}

impl TrigPolynomial {
    pub fn eval(&self, t: &[f64]) -> Result<f64> {
        domain_check(t.len() == self.n, || format!("expected {} angles", self.n))?;
        let cm = cos_table(t, self.max_part());
        Ok(self.terms.iter().map(|(nu, c)| c * orbit_sum_unchecked(nu, &cm)).sum())
    }

    pub fn value_at_zero(&self) -> f64 {
        self.terms.iter().map(|(nu, c)| c * orbit_size(nu) as f64).sum()
    }

    pub fn coefficient(&self, nu: &[u32]) -> f64 {
        self.terms.iter().find(|(w, _)| w == nu).map_or(0.0, |(_, c)| *c)
    }

    fn max_part(&self) -> u32 {
        self.terms.iter().flat_map(|(w, _)| w.iter().copied()).max().unwrap_or(0)
    }
}

fn cos_table(t: &[f64], max_part: u32) -> Vec<Vec<f64>> {
    t.iter()
        .map(|&x| (0..=max_part).map(|m| (m as f64 * x).cos()).collect())
        .collect()
}

/// Quadrature nodes in angle coordinates with weights for `⟨f, g⟩_{δ_k}`,
/// up to a positive constant.
fn inner_product_rule(k: &MultiplicityBC, n: usize, spec: &IntegrationSpec) -> Result<Vec<(Vec<f64>, f64)>> {
    let (a, b) = k.jacobi_parameters();
    let angle = |y: f64| (1.0 - 2.0 * y).clamp(-1.0, 1.0).acos();
    match spec.method {
        Method::GaussJacobiTensor => {
            domain_check(spec.nodes_per_axis >= 2, || "at least two nodes required".into())?;
            if n == 1 {
                let rule = gauss_jacobi(spec.nodes_per_axis, a, b)?;
                Ok(rule.nodes.iter().zip(&rule.weights).map(|(&y, &w)| (vec![angle(y)], w)).collect())
            } else {
                let rule = selberg_triangle_rule(a, b, 2.0 * k.k3, spec.nodes_per_axis)?;
                Ok(rule
                    .into_iter()
                    .map(|(y, w)| (vec![angle(y[0]), angle(y[1])], w))
                    .collect())
            }
        }
        Method::TrapezoidPeriodic => {
            let p = spec.nodes_per_axis;
            let h = 2.0 * PI / p as f64;
            let total = p.pow(n as u32);
            Ok((0..total)
                .map(|idx| {
                    let t: Vec<f64> = (0..n).map(|i| (idx / p.pow(i as u32) % p) as f64 * h).collect();
                    let w = k.weight(&t) / total as f64;
                    (t, w)
                })
                .collect())
        }
        _ => Err(Error::ParameterDomain(format!(
            "{:?} is not supported for torus inner products",
            spec.method
        ))),
    }
}

/// Torus inner product `⟨f, g⟩_{δ_k}` normalized by `(2π)^{-n}`.
pub fn torus_inner_product<F, G>(k: &MultiplicityBC, n: usize, f: F, g: G, spec: &IntegrationSpec) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
    G: Fn(&[f64]) -> f64 + Sync,
{
    check_rank(n)?;
    let est = integrate_torus(|t| Complex64::new(f(t) * g(t) * k.weight(t), 0.0), n, spec)?;
    Ok(est.value.re)
}

/// The monic family `P_λ(k; ·)` on a dominance down-set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoFamily {
    pub k: MultiplicityBC,
    pub n: usize,
    /// Weights in the fixed total order.
    pub weights: Vec<Vec<u32>>,
    /// `coefficients[i][j] = c_{λ_i ν_j}` for `j ≤ i`, unit diagonal.
    pub coefficients: Vec<Vec<f64>>,
    /// `P_λ(k; 0)`.
    pub at_zero: Vec<f64>,
    pub gram_condition: f64,
    pub spec: IntegrationSpec,
}

impl HoFamily {
    /// Gram-Schmidt of the orbit sums on `weights`, which must be closed
    /// under dominance.
    pub fn new(k: MultiplicityBC, n: usize, mut weights: Vec<Vec<u32>>, spec: &IntegrationSpec) -> Result<Self> {
        check_rank(n)?;
        domain_check(!weights.is_empty(), || "empty weight set".into())?;
        for w in &weights {
            check_weight(w, n)?;
        }
        sort_weights(&mut weights);
        for (i, w) in weights.iter().enumerate() {
            let below = weights_below(w);
            domain_check(below.iter().all(|v| weights[..=i].contains(v)), || {
                format!("weight set is not closed under dominance below {w:?}")
            })?;
        }
        let max_part = weights.iter().flat_map(|w| w.iter().copied()).max().unwrap_or(0);
        if n == 1 {
            domain_check(max_part <= MAX_DEGREE_RANK_ONE, || {
                format!("rank-one degree must be <= {MAX_DEGREE_RANK_ONE}")
            })?;
        } else {
            domain_check(max_part <= MAX_PART_RANK_TWO, || {
                format!("rank-two parts must be <= {MAX_PART_RANK_TWO}")
            })?;
        }
        let rule = inner_product_rule(&k, n, spec)?;
        let dim = weights.len();
        let values: Vec<Vec<f64>> = rule
            .par_iter()
            .map(|(t, _)| {
                let cm = cos_table(t, max_part);
                weights.iter().map(|w| orbit_sum_unchecked(w, &cm)).collect()
            })
            .collect();
        let v = DMatrix::from_fn(rule.len(), dim, |i, j| values[i][j]);
        let wv = DMatrix::from_fn(rule.len(), dim, |i, j| values[i][j] * rule[i].1);
        let gram = v.transpose() * wv;
        let eig = gram.clone().symmetric_eigen();
        let (lo, hi) = eig
            .eigenvalues
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e.abs())));
        let gram_condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if gram_condition > MAX_CONDITION {
            return Err(Error::IllConditioned(format!(
                "Gram matrix condition {gram_condition:e} exceeds {MAX_CONDITION:e}"
            )));
        }
        let chol = gram
            .cholesky()
            .ok_or_else(|| Error::IllConditioned("Gram matrix is not positive definite".into()))?;
        let l = chol.l();
        let linv = l
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::IllConditioned("singular Cholesky factor".into()))?;
        let mut coefficients = Vec::with_capacity(dim);
        let mut at_zero = Vec::with_capacity(dim);
        for i in 0..dim {
            let row: Vec<f64> = (0..=i).map(|j| l[(i, i)] * linv[(i, j)]).collect();
            at_zero.push(row.iter().zip(&weights).map(|(c, w)| c * orbit_size(w) as f64).sum());
            coefficients.push(row);
        }
        Ok(HoFamily {
            k,
            n,
            weights,
            coefficients,
            at_zero,
            gram_condition,
            spec: spec.clone(),
        })
    }

    pub fn upto(k: MultiplicityBC, n: usize, cutoff: u32, spec: &IntegrationSpec) -> Result<Self> {
        HoFamily::new(k, n, weights_upto(n, cutoff), spec)
    }

    pub fn index_of(&self, lam: &[u32]) -> Option<usize> {
        self.weights.iter().position(|w| w == lam)
    }

    /// The monic `P_λ`.
    pub fn monic(&self, i: usize) -> TrigPolynomial {
        TrigPolynomial {
            n: self.n,
            weight: self.weights[i].clone(),
            terms: self.weights[..=i].iter().cloned().zip(self.coefficients[i].iter().copied()).collect(),
        }
    }

    /// `R_λ = P_λ / P_λ(0)`.
    pub fn normalized(&self, i: usize) -> TrigPolynomial {
        let mut p = self.monic(i);
        for (_, c) in &mut p.terms {
            *c /= self.at_zero[i];
        }
        p
    }

    /// All `R_λ(t)` at once.
    pub fn eval_normalized(&self, t: &[f64]) -> Result<Vec<f64>> {
        domain_check(t.len() == self.n, || format!("expected {} angles", self.n))?;
        let max_part = self.weights.iter().flat_map(|w| w.iter().copied()).max().unwrap_or(0);
        let cm = cos_table(t, max_part);
        let m: Vec<f64> = self.weights.iter().map(|w| orbit_sum_unchecked(w, &cm)).collect();
        Ok(self
            .coefficients
            .iter()
            .zip(&self.at_zero)
            .map(|(row, z)| row.iter().zip(&m).map(|(c, v)| c * v).sum::<f64>() / z)
            .collect())
    }

    /// Smallest coefficient of any `P_λ` in the orbit-sum basis.
    pub fn min_monic_coefficient(&self) -> f64 {
        self.coefficients.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `R_λ(k; ·)` for all `|λ| ≤ degree_cutoff`.
pub fn ho_polynomials(k: &MultiplicityBC, n: usize, degree_cutoff: u32, spec: &IntegrationSpec) -> Result<Vec<TrigPolynomial>> {
    let fam = HoFamily::upto(*k, n, degree_cutoff, spec)?;
    Ok((0..fam.weights.len()).map(|i| fam.normalized(i)).collect())
}

/// `R_λ(k'; ·) = Σ_{ν ≤ λ} c_{λν}(k', k) R_ν(k; ·)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectionMatrix {
    pub source: MultiplicityBC,
    pub target: MultiplicityBC,
    pub n: usize,
    pub weights: Vec<Vec<u32>>,
    /// Row `i` holds coefficients against `weights[0..=i]`.
    pub coefficients: Vec<Vec<f64>>,
    /// Pointwise reconstruction residual per row on a test grid.
    pub residuals: Vec<f64>,
    /// Largest coefficient between dominance-incomparable weights.
    pub max_incomparable: f64,
}

impl ConnectionMatrix {
    pub fn index_of(&self, lam: &[u32]) -> Option<usize> {
        self.weights.iter().position(|w| w == lam)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.coefficients.iter().map(|r| r.iter().sum()).collect()
    }

    /// Minimum over dominance-comparable coefficients.
    pub fn min_coefficient(&self) -> f64 {
        let mut m = f64::INFINITY;
        for (i, row) in self.coefficients.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if dominance_le(&self.weights[j], &self.weights[i]) {
                    m = m.min(c);
                }
            }
        }
        m
    }

    /// Long-format CSV: `lambda,nu,coefficient`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["lambda", "nu", "coefficient"]).expect("in-memory write");
        let fmt = |v: &[u32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        for (i, row) in self.coefficients.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if dominance_le(&self.weights[j], &self.weights[i]) {
                    w.write_record([fmt(&self.weights[i]), fmt(&self.weights[j]), format!("{c:e}")])
                        .expect("in-memory write");
                }
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

fn test_grid(n: usize) -> Vec<Vec<f64>> {
    let pts: Vec<f64> = (0..9).map(|i| 0.17 + 0.33 * i as f64).collect();
    if n == 1 {
        pts.iter().map(|&t| vec![t]).collect()
    } else {
        pts.iter().flat_map(|&a| pts.iter().map(move |&b| vec![a, b])).collect()
    }
}

/// Connection between two families computed on the same weights.
pub fn connect_families(src: &HoFamily, dst: &HoFamily) -> Result<ConnectionMatrix> {
    domain_check(src.weights == dst.weights && src.n == dst.n, || {
        "families are indexed by different weights".into()
    })?;
    let dim = src.weights.len();
    let lower = |f: &HoFamily| {
        DMatrix::from_fn(dim, dim, |i, j| if j <= i { f.coefficients[i][j] } else { 0.0 })
    };
    let (cs, cd) = (lower(src), lower(dst));
    let cs_inv = cs
        .solve_lower_triangular(&DMatrix::identity(dim, dim))
        .ok_or_else(|| Error::IllConditioned("singular source family".into()))?;
    // R(k') = D'^{-1} C' C^{-1} D R(k) with D = diag P(k; 0).
    let mut x = cd * cs_inv;
    for i in 0..dim {
        for j in 0..dim {
            x[(i, j)] *= src.at_zero[j] / dst.at_zero[i];
        }
    }
    let coefficients: Vec<Vec<f64>> = (0..dim).map(|i| (0..=i).map(|j| x[(i, j)]).collect()).collect();
    let mut residuals = vec![0.0f64; dim];
    for t in test_grid(src.n) {
        let rs = src.eval_normalized(&t)?;
        let rd = dst.eval_normalized(&t)?;
        for i in 0..dim {
            let rec: f64 = coefficients[i].iter().zip(&rs).map(|(c, v)| c * v).sum();
            residuals[i] = residuals[i].max((rec - rd[i]).abs());
        }
    }
    let mut max_incomparable = 0.0f64;
    for i in 0..dim {
        for j in 0..i {
            if !dominance_le(&src.weights[j], &src.weights[i]) {
                max_incomparable = max_incomparable.max(coefficients[i][j].abs());
            }
        }
    }
    Ok(ConnectionMatrix {
        source: src.k,
        target: dst.k,
        n: src.n,
        weights: src.weights.clone(),
        coefficients,
        residuals,
        max_incomparable,
    })
}

pub fn ho_connection(
    k: &MultiplicityBC,
    kp: &MultiplicityBC,
    n: usize,
    degree_cutoff: u32,
    spec: &IntegrationSpec,
) -> Result<ConnectionMatrix> {
    let src = HoFamily::upto(*k, n, degree_cutoff, spec)?;
    let dst = HoFamily::upto(*kp, n, degree_cutoff, spec)?;
    connect_families(&src, &dst)
}

/// One row of a sign scan: the connection row of `λ = (m, m)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignScanRow {
    pub m: u32,
    pub min_coefficient: f64,
    pub argmin: Vec<u32>,
    pub abs_sum: f64,
    pub negative: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignScanReport {
    pub source: MultiplicityBC,
    pub target: MultiplicityBC,
    /// `h₁ + h₂ = (k'₁ + k'₂) - (k₁ + k₂)`.
    pub shift: f64,
    pub sigma: SigmaVerdict,
    pub rows: Vec<SignScanRow>,
    pub any_negative: bool,
}

/// Tabulates the connection rows of `(m, m)` for `m = 1..=max_m` at rank 2.
pub fn sign_scan(k: &MultiplicityBC, kp: &MultiplicityBC, max_m: u32, spec: &IntegrationSpec) -> Result<SignScanReport> {
    domain_check((1..=MAX_PART_RANK_TWO).contains(&max_m), || {
        format!("max_m must lie in 1..={MAX_PART_RANK_TWO}")
    })?;
    let weights = weights_below(&[max_m, max_m]);
    let src = HoFamily::new(*k, 2, weights.clone(), spec)?;
    let dst = HoFamily::new(*kp, 2, weights, spec)?;
    let conn = connect_families(&src, &dst)?;
    let shift = (kp.k1 + kp.k2) - (k.k1 + k.k2);
    let sigma = if k.k3 > 0.0 {
        sigma_classify(Complex64::new(shift, 0.0), k.k3, 2)
    } else {
        SigmaVerdict::Outside
    };
    let mut rows = Vec::new();
    for m in 1..=max_m {
        let i = conn.index_of(&[m, m]).expect("weight in down-set");
        let mut min = f64::INFINITY;
        let mut argmin = Vec::new();
        let mut abs_sum = 0.0;
        for (j, &c) in conn.coefficients[i].iter().enumerate() {
            if !dominance_le(&conn.weights[j], &conn.weights[i]) {
                continue;
            }
            abs_sum += c.abs();
            if c < min {
                min = c;
                argmin = conn.weights[j].clone();
            }
        }
        rows.push(SignScanRow {
            m,
            min_coefficient: min,
            argmin,
            abs_sum,
            negative: min < -1e-10,
        });
    }
    let any_negative = rows.iter().any(|r| r.negative);
    Ok(SignScanReport {
        source: *k,
        target: *kp,
        shift,
        sigma,
        rows,
        any_negative,
    })
}

/// `|R_{mλ}(k; t/m) - J^B_{k₀}(λ, it)|` for one `m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionRow {
    pub m: u32,
    pub polynomial: f64,
    pub limit: f64,
    pub error: f64,
}

/// The rational limit `J^B_{k₀}(λ, it)`, `k₀ = (k₁+k₂, k₃)`.
pub fn contraction_limit(k: &MultiplicityBC, lam: &[u32], t: &[f64]) -> Result<f64> {
    let (a, b) = k.contracted();
    if lam.len() == 1 {
        return Ok(bessel_1d(a - 0.5, Complex64::new(lam[0] as f64 * t[0], 0.0))?.re);
    }
    let kb = MultiplicityB::real(a, b)?;
    let z: Vec<Complex64> = lam.iter().map(|&l| Complex64::new(l as f64, 0.0)).collect();
    let w: Vec<Complex64> = t.iter().map(|&x| Complex64::new(0.0, x)).collect();
    Ok(bessel_b(&kb, &z, &w, DEFAULT_MAX_WEIGHT + 8)?.value.re)
}

pub fn contraction_check(
    k: &MultiplicityBC,
    lam: &[u32],
    t: &[f64],
    m_list: &[u32],
    spec: &IntegrationSpec,
) -> Result<Vec<ContractionRow>> {
    let n = lam.len();
    check_rank(n)?;
    check_weight(lam, t.len())?;
    let limit = contraction_limit(k, lam, t)?;
    let top = m_list.iter().copied().max().unwrap_or(0);
    let scaled: Vec<u32> = lam.iter().map(|&l| l * top).collect();
    let fam = HoFamily::new(*k, n, weights_below(&scaled), spec)?;
    m_list
        .iter()
        .map(|&m| {
            let target: Vec<u32> = lam.iter().map(|&l| l * m).collect();
            let i = fam.index_of(&target).expect("scaled weight in down-set");
            let ts: Vec<f64> = t.iter().map(|x| x / m as f64).collect();
            let p = fam.normalized(i).eval(&ts)?;
            Ok(ContractionRow {
                m,
                polynomial: p,
                limit,
                error: (p - limit).abs(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_sum_examples() {
        assert_eq!(orbit_sum(&[0], &[0.7]).unwrap(), 1.0);
        assert!((orbit_sum(&[1], &[0.7]).unwrap() - 2.0 * 0.7f64.cos()).abs() < 1e-15);
        assert_eq!(orbit_sum(&[1, 0], &[0.0, 0.0]).unwrap(), 4.0);
        assert_eq!(orbit_size(&[2, 1]), 8);
        assert_eq!(orbit_size(&[2, 2]), 4);
        assert_eq!(orbit_size(&[0, 0]), 1);
    }

    #[test]
    fn fast_orbit_sum_matches_definition() {
        let t = [0.37, -1.21];
        let cm = cos_table(&t, 5);
        for w in weights_upto(2, 7).into_iter().filter(|w| w[0] <= 5) {
            let a = orbit_sum(&w, &t).unwrap();
            assert!((orbit_sum_unchecked(&w, &cm) - a).abs() < 1e-13, "{w:?}");
        }
    }

    #[test]
    fn total_order_extends_dominance() {
        let w = weights_upto(2, 8);
        assert_eq!(w.len(), 25);
        for i in 0..w.len() {
            for j in (i + 1)..w.len() {
                assert!(!dominance_le(&w[j], &w[i]) || w[i] == w[j]);
            }
        }
        assert_eq!(&w[..4], &[vec![0, 0], vec![1, 0], vec![1, 1], vec![2, 0]]);
        assert!(!dominance_le(&[3, 0], &[2, 2]) && !dominance_le(&[2, 2], &[3, 0]));
    }

    #[test]
    fn down_set_of_square() {
        let w = weights_below(&[3, 3]);
        assert!(w.iter().all(|v| v[0] <= 3));
        assert_eq!(w.len(), 10);
        assert_eq!(w.last().unwrap(), &vec![3, 3]);
    }

    #[test]
    fn geometric_multiplicities() {
        let g = GeometricMultiplicity::new(1, 3, 2).unwrap().multiplicity();
        assert_eq!((g.k1, g.k2, g.k3), (0.5, 0.0, 0.5));
        assert!(GeometricMultiplicity::new(3, 3, 2).is_err());
        assert!(GeometricMultiplicity::new(1, 2, 2).is_err());
    }

    #[test]
    fn family_rejects_non_down_set() {
        let spec = IntegrationSpec::gauss_jacobi(16, 0.0, 0.0);
        let k = MultiplicityBC::new(0.5, 0.5, 1.0).unwrap();
        assert!(HoFamily::new(k, 2, vec![vec![0, 0], vec![2, 0]], &spec).is_err());
    }
}
