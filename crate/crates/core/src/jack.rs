//! Partitions, generalized Pochhammer symbols and Jack polynomials in the
//! C-normalization, i.e. `sum_{|λ|=m} C_λ^α(z) = (z_1 + ... + z_n)^m`.
//!
//! Jack polynomials are held in the monomial symmetric basis. The monic
//! (P-normalized) coefficients come from the eigen-equation of the
//! Laplace-Beltrami type operator, and the C-normalization constants are then
//! fixed weight by weight by matching the monomial expansion of the power sum
//! `p_1^m`. Coefficient tables are cached per `(α, weight, n)`.

use crate::error::{domain_check, Error, Result};
use crate::special::rising;
use num_complex::Complex64;
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

/// A partition: weakly decreasing positive parts (trailing zeros are
/// dropped on construction).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::ParameterDomain(format!(
                "partition parts must be weakly decreasing, got {parts:?}"
            )));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// Nonzero parts.
    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `i`-th part (zero beyond the length).
    pub fn part(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    /// Parts padded with zeros to length `n`.
    pub fn padded(&self, n: usize) -> Vec<u32> {
        let mut v = self.0.clone();
        v.resize(n.max(v.len()), 0);
        v
    }

    /// Dominance order for partitions of equal weight: `self ≥ other`.
    pub fn dominates(&self, other: &Partition) -> bool {
        if self.weight() != other.weight() {
            return false;
        }
        partial_sums_dominate(&self.0, &other.0)
    }

    /// Conjugate (transposed) partition.
    pub fn conjugate(&self) -> Partition {
        let l1 = self.part(0) as usize;
        let parts = (0..l1)
            .map(|j| self.0.iter().filter(|&&p| p as usize > j).count() as u32)
            .collect();
        Partition(parts)
    }

    /// Display with zero padding to `n` parts, e.g. `(2,0)`.
    pub fn display_padded(&self, n: usize) -> String {
        let p = self.padded(n);
        let inner: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        format!("({})", inner.join(","))
    }
}

/// `lhs ≥ rhs` in the partial-sum order (no weight condition).
pub(crate) fn partial_sums_dominate(lhs: &[u32], rhs: &[u32]) -> bool {
    let len = lhs.len().max(rhs.len());
    let (mut sl, mut sr) = (0u64, 0u64);
    for i in 0..len {
        sl += lhs.get(i).copied().unwrap_or(0) as u64;
        sr += rhs.get(i).copied().unwrap_or(0) as u64;
        if sl < sr {
            return false;
        }
    }
    true
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Vec<u32> {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", inner.join(","))
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Accepts `2,1`, `(2,1)`, `2 1`, `()` and the empty string.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let parts = t
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|x| !x.is_empty())
            .map(|x| {
                x.parse::<u32>()
                    .map_err(|_| Error::ParameterDomain(format!("invalid partition part {x:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

/// A partition together with a Jack parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JackIndex {
    pub partition: Partition,
    pub alpha: f64,
}

impl JackIndex {
    pub fn new(partition: Partition, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(JackIndex { partition, alpha })
    }
}

/// All partitions of `m` with at most `n` parts, in decreasing
/// lexicographic order (the fixed order used throughout the crate).
pub fn enumerate_partitions(m: u32, n: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(rem: u32, max: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        if slots == 0 {
            return;
        }
        for p in (1..=rem.min(max)).rev() {
            cur.push(p);
            rec(rem - p, p, slots - 1, cur, out);
            cur.pop();
        }
    }
    if n == 0 {
        if m == 0 {
            out.push(Partition::empty());
        }
        return out;
    }
    rec(m, m, n, &mut cur, &mut out);
    out
}

/// All partitions of weight `0..=max_weight` with at most `n` parts, graded.
pub fn enumerate_partitions_upto(max_weight: u32, n: usize) -> Vec<Partition> {
    (0..=max_weight).flat_map(|m| enumerate_partitions(m, n)).collect()
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    domain_check(alpha.is_finite() && alpha > 0.0, || {
        format!("Jack parameter alpha must be positive, got {alpha}")
    })
}

/// Generalized Pochhammer symbol `(μ)_λ^α = Π_j (μ - (j-1)/α)_{λ_j}`.
pub fn gen_pochhammer(mu: Complex64, lam: &Partition, alpha: f64) -> Complex64 {
    lam.parts()
        .iter()
        .enumerate()
        .fold(Complex64::new(1.0, 0.0), |acc, (j, &p)| {
            acc * rising(mu - j as f64 / alpha, p)
        })
}

/// Like [`gen_pochhammer`] but reports a vanishing factor as an error.
pub fn gen_pochhammer_checked(mu: Complex64, lam: &Partition, alpha: f64) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for (j, &p) in lam.parts().iter().enumerate() {
        let base = mu - j as f64 / alpha;
        for i in 0..p {
            let f = base + i as f64;
            if f.norm() <= 1e-12 * (1.0 + mu.norm()) {
                return Err(Error::PochhammerZero {
                    mu: format!("{mu}"),
                    partition: lam.to_string(),
                    alpha,
                });
            }
            acc *= f;
        }
    }
    Ok(acc)
}

/// Monomial-basis coefficient table of all C-normalized Jack polynomials of
/// one weight in `n` variables.
#[derive(Debug)]
pub struct JackTable {
    pub alpha: f64,
    pub weight: u32,
    pub n: usize,
    /// Partitions of `weight` with at most `n` parts, decreasing lex order.
    pub partitions: Vec<Partition>,
    /// `coeffs[i][j]`: coefficient of `m_{partitions[j]}` in
    /// `C_{partitions[i]}`; zero for `j < i`.
    pub coeffs: Vec<Vec<f64>>,
    /// `C_λ(1,...,1)` for each partition.
    pub at_one: Vec<f64>,
    index: HashMap<Partition, usize>,
}

impl JackTable {
    fn build(alpha: f64, weight: u32, n: usize) -> JackTable {
        let partitions = enumerate_partitions(weight, n);
        let len = partitions.len();
        let index: HashMap<Partition, usize> = partitions
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let rho = |p: &Partition| -> f64 {
            p.parts()
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let x = x as f64;
                    x * (x - 1.0 - 2.0 / alpha * i as f64)
                })
                .sum()
        };

        // Monic coefficients from the eigen-equation recursion.
        let mut monic = vec![vec![0.0; len]; len];
        for i in 0..len {
            let lam = &partitions[i];
            let rho_lam = rho(lam);
            monic[i][i] = 1.0;
            for j in (i + 1)..len {
                let mu = &partitions[j];
                if !lam.dominates(mu) {
                    continue;
                }
                let pm = mu.padded(n);
                let mut acc = 0.0;
                for p in 0..n {
                    for q in (p + 1)..n {
                        for t in 1..=pm[q] {
                            let mut nu = pm.clone();
                            nu[p] += t;
                            nu[q] -= t;
                            nu.sort_unstable_by(|a, b| b.cmp(a));
                            let nu = Partition::new(nu).expect("sorted");
                            if let Some(&k) = index.get(&nu) {
                                let c = monic[i][k];
                                if c != 0.0 {
                                    acc += (pm[p] as f64 - pm[q] as f64 + 2.0 * t as f64) * c;
                                }
                            }
                        }
                    }
                }
                monic[i][j] = (2.0 / alpha) * acc / (rho_lam - rho(mu));
            }
        }

        // Normalization constants: p_1^m = Σ_μ m!/Π μ_i! · m_μ.
        let multinom = |p: &Partition| -> f64 {
            let mut v = ln_factorial(weight);
            for &x in p.parts() {
                v -= ln_factorial(x);
            }
            v.exp()
        };
        let mut norm = vec![0.0; len];
        for i in 0..len {
            let above: f64 = (0..i).map(|k| norm[k] * monic[k][i]).sum();
            norm[i] = multinom(&partitions[i]) - above;
        }
        let coeffs: Vec<Vec<f64>> = (0..len)
            .map(|i| monic[i].iter().map(|c| c * norm[i]).collect())
            .collect();
        let mono_at_one: Vec<f64> = partitions.iter().map(|p| monomial_at_one(p, n)).collect();
        let at_one = coeffs
            .iter()
            .map(|row| row.iter().zip(&mono_at_one).map(|(c, m)| c * m).sum())
            .collect();
        JackTable {
            alpha,
            weight,
            n,
            partitions,
            coeffs,
            at_one,
            index,
        }
    }

    pub fn index_of(&self, lam: &Partition) -> Option<usize> {
        self.index.get(lam).copied()
    }

    /// Values `C_λ(x)` for every partition of the table, in table order.
    pub fn eval_all(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mono: Vec<Complex64> = self.partitions.iter().map(|p| monomial(p, x)).collect();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row[i..]
                    .iter()
                    .zip(&mono[i..])
                    .fold(Complex64::new(0.0, 0.0), |acc, (c, m)| acc + m * *c)
            })
            .collect()
    }
}

fn ln_factorial(k: u32) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// Monomial symmetric polynomial `m_μ(x)`: the sum of `x^σ(μ)` over distinct
/// rearrangements of μ padded to `x.len()`.
pub fn monomial(mu: &Partition, x: &[Complex64]) -> Complex64 {
    let n = x.len();
    if mu.len() > n {
        return Complex64::new(0.0, 0.0);
    }
    let mut exps = mu.padded(n);
    exps.sort_unstable();
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        let term = exps
            .iter()
            .zip(x)
            .fold(Complex64::new(1.0, 0.0), |acc, (&e, xi)| acc * xi.powu(e));
        total += term;
        if !next_permutation(&mut exps) {
            break;
        }
    }
    total
}

/// Number of distinct rearrangements of μ padded to `n`, i.e. `m_μ(1^n)`.
pub fn monomial_at_one(mu: &Partition, n: usize) -> f64 {
    if mu.len() > n {
        return 0.0;
    }
    let p = mu.padded(n);
    let mut counts: HashMap<u32, u32> = HashMap::new();
    for x in p {
        *counts.entry(x).or_default() += 1;
    }
    let mut v = ln_factorial(n as u32);
    for c in counts.values() {
        v -= ln_factorial(*c);
    }
    v.exp().round()
}

fn next_permutation(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Shared, read-mostly cache of [`JackTable`]s.
pub struct JackCache {
    weight_cutoff: u32,
    tables: RwLock<HashMap<(u64, u32, usize), Arc<JackTable>>>,
}

impl JackCache {
    pub const DEFAULT_WEIGHT_CUTOFF: u32 = 20;

    pub fn new(weight_cutoff: u32) -> Self {
        JackCache {
            weight_cutoff,
            tables: RwLock::new(HashMap::new()),
        }
    }

    /// Table for `(α, weight, n)`; weights above the cutoff are computed
    /// without being stored.
    pub fn table(&self, alpha: f64, weight: u32, n: usize) -> Arc<JackTable> {
        let key = (alpha.to_bits(), weight, n);
        if let Some(t) = self.tables.read().get(&key) {
            return t.clone();
        }
        let table = Arc::new(JackTable::build(alpha, weight, n));
        if weight <= self.weight_cutoff {
            self.tables.write().entry(key).or_insert_with(|| table.clone());
        }
        table
    }

    pub fn len(&self) -> usize {
        self.tables.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for JackCache {
    fn default() -> Self {
        JackCache::new(Self::DEFAULT_WEIGHT_CUTOFF)
    }
}

/// Process-wide cache used by the free functions of this crate.
pub fn global_cache() -> &'static JackCache {
    static CACHE: OnceLock<JackCache> = OnceLock::new();
    CACHE.get_or_init(JackCache::default)
}

fn table_for(lam: &Partition, alpha: f64, n: usize) -> Result<(Arc<JackTable>, usize)> {
    check_alpha(alpha)?;
    domain_check(lam.len() <= n, || {
        format!("partition {lam} has more than n = {n} parts")
    })?;
    let table = global_cache().table(alpha, lam.weight(), n);
    let idx = table.index_of(lam).expect("partition present in its table");
    Ok((table, idx))
}

/// `C_λ^α(x)` for a complex point `x` of length `n`.
pub fn jack_c(lam: &Partition, alpha: f64, x: &[Complex64]) -> Result<Complex64> {
    let (table, idx) = table_for(lam, alpha, x.len())?;
    let row = &table.coeffs[idx];
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, mu) in table.partitions.iter().enumerate().skip(idx) {
        if row[j] != 0.0 {
            acc += monomial(mu, x) * row[j];
        }
    }
    Ok(acc)
}

/// Real-argument convenience wrapper for [`jack_c`].
pub fn jack_c_real(lam: &Partition, alpha: f64, x: &[f64]) -> Result<f64> {
    let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    jack_c(lam, alpha, &xc).map(|v| v.re)
}

/// `C_λ^α(1, ..., 1)` in `n` variables.
pub fn jack_c_at_one(lam: &Partition, alpha: f64, n: usize) -> Result<f64> {
    let (table, idx) = table_for(lam, alpha, n)?;
    Ok(table.at_one[idx])
}
