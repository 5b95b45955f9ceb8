//! The hypergeometric series ₀F₁^α of two vector arguments, the Bessel
//! function of type B_n, and rank-one closed forms.

use crate::error::{domain_check, Error, Result};
use crate::jack::{check_alpha, gen_pochhammer_checked, global_cache};
use crate::special::{nonpositive_integer, rising_real};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Default truncation weight of the ₀F₁^α series.
pub const DEFAULT_MAX_WEIGHT: u32 = 16;

/// Multiplicity `(k_1, k_2)` on B_n: `k_1` on `±e_i`, `k_2` on `±e_i ± e_j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityB {
    pub k1: Complex64,
    pub k2: f64,
}

impl MultiplicityB {
    pub fn new(k1: Complex64, k2: f64) -> Result<Self> {
        domain_check(k1.re >= 0.0, || format!("Re k1 must be >= 0, got {k1}"))?;
        domain_check(k2 > 0.0 && k2.is_finite(), || format!("k2 must be positive, got {k2}"))?;
        Ok(MultiplicityB { k1, k2 })
    }

    pub fn real(k1: f64, k2: f64) -> Result<Self> {
        MultiplicityB::new(Complex64::new(k1, 0.0), k2)
    }

    /// Jack parameter α = 1/k₂.
    pub fn alpha(&self) -> f64 {
        1.0 / self.k2
    }

    /// μ(k) = k₁ + k₂(n−1) + 1/2.
    pub fn mu(&self, n: usize) -> Complex64 {
        self.k1 + self.k2 * (n as f64 - 1.0) + 0.5
    }

    /// The shifted multiplicity `(k₁ + h, k₂)`.
    pub fn shifted(&self, h: Complex64) -> MultiplicityB {
        MultiplicityB {
            k1: self.k1 + h,
            k2: self.k2,
        }
    }
}

/// A truncated series value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: Complex64,
    /// Truncation weight M: all partitions with |λ| ≤ M are summed.
    pub max_weight: u32,
    /// Sum of absolute values of the weight-M terms.
    pub last_shell: f64,
    pub terms: usize,
    /// Set when the shell sums grew over the last three weights.
    pub diverging: bool,
}

/// ₀F₁^α(μ; z, ·) with the `z`-dependent factors precomputed, for repeated
/// evaluation at many second arguments.
pub struct Hyp0F1Series {
    alpha: f64,
    n: usize,
    max_weight: u32,
    /// Per weight: `C_λ(z) / (C_λ(1) (μ)_λ |λ|!)` in table order.
    coefficients: Vec<Vec<Complex64>>,
}

impl Hyp0F1Series {
    pub fn new(alpha: f64, mu: Complex64, z: &[Complex64], max_weight: u32) -> Result<Self> {
        check_alpha(alpha)?;
        let n = z.len();
        domain_check(n >= 1, || "series needs at least one variable".into())?;
        let mut coefficients = Vec::with_capacity(max_weight as usize + 1);
        let mut factorial = 1.0;
        for m in 0..=max_weight {
            if m > 0 {
                factorial *= m as f64;
            }
            let table = global_cache().table(alpha, m, n);
            let cz = table.eval_all(z);
            let mut row = Vec::with_capacity(table.partitions.len());
            for (i, lam) in table.partitions.iter().enumerate() {
                let poch = gen_pochhammer_checked(mu, lam, alpha)?;
                row.push(cz[i] / (poch * table.at_one[i] * factorial));
            }
            coefficients.push(row);
        }
        Ok(Hyp0F1Series {
            alpha,
            n,
            max_weight,
            coefficients,
        })
    }

    pub fn eval(&self, w: &[Complex64]) -> Result<SeriesValue> {
        domain_check(w.len() == self.n, || {
            format!("argument lengths differ: {} vs {}", self.n, w.len())
        })?;
        let mut value = Complex64::new(0.0, 0.0);
        let mut shells = Vec::with_capacity(self.max_weight as usize + 1);
        let mut terms = 0;
        for (m, row) in self.coefficients.iter().enumerate() {
            let table = global_cache().table(self.alpha, m as u32, self.n);
            let cw = table.eval_all(w);
            let mut shell = 0.0;
            for (c, v) in row.iter().zip(&cw) {
                let t = c * v;
                value += t;
                shell += t.norm();
                terms += 1;
            }
            shells.push(shell);
        }
        let k = shells.len();
        let diverging = k >= 4 && shells[k - 1] > shells[k - 2] && shells[k - 2] > shells[k - 3]
            && shells[k - 3] > shells[k - 4];
        Ok(SeriesValue {
            value,
            max_weight: self.max_weight,
            last_shell: *shells.last().unwrap_or(&0.0),
            terms,
            diverging,
        })
    }

    /// Real-argument evaluation.
    pub fn eval_real(&self, w: &[f64]) -> Result<SeriesValue> {
        let wc: Vec<Complex64> = w.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.eval(&wc)
    }
}

/// Partial sum of `Σ_{|λ| ≤ M} C_λ(z) C_λ(w) / ((μ)_λ |λ|! C_λ(1))`.
pub fn hyp0f1(
    alpha: f64,
    mu: Complex64,
    z: &[Complex64],
    w: &[Complex64],
    max_weight: u32,
) -> Result<SeriesValue> {
    domain_check(z.len() == w.len(), || {
        format!("argument lengths differ: {} vs {}", z.len(), w.len())
    })?;
    Hyp0F1Series::new(alpha, mu, z, max_weight)?.eval(w)
}

fn squares(v: &[Complex64], scale: f64) -> Vec<Complex64> {
    v.iter().map(|x| x * x * scale).collect()
}

/// `J_k^B(z, w) = ₀F₁^α(μ(k); z²/4, w²)` with α = 1/k₂.
pub fn bessel_b(
    k: &MultiplicityB,
    z: &[Complex64],
    w: &[Complex64],
    max_weight: u32,
) -> Result<SeriesValue> {
    hyp0f1(k.alpha(), k.mu(z.len()), &squares(z, 0.25), &squares(w, 1.0), max_weight)
}

/// The symmetric form `₀F₁^α(μ(k); z²/2, w²/2)`.
pub fn bessel_b_symmetric(
    k: &MultiplicityB,
    z: &[Complex64],
    w: &[Complex64],
    max_weight: u32,
) -> Result<SeriesValue> {
    hyp0f1(k.alpha(), k.mu(z.len()), &squares(z, 0.5), &squares(w, 0.5), max_weight)
}

/// `J_k^B(z, ·)` prepared for many second arguments.
pub struct BesselB {
    series: Hyp0F1Series,
}

impl BesselB {
    pub fn new(k: &MultiplicityB, z: &[Complex64], max_weight: u32) -> Result<Self> {
        Ok(BesselB {
            series: Hyp0F1Series::new(k.alpha(), k.mu(z.len()), &squares(z, 0.25), max_weight)?,
        })
    }

    pub fn eval_real(&self, w: &[f64]) -> Result<SeriesValue> {
        let sq: Vec<f64> = w.iter().map(|x| x * x).collect();
        self.series.eval_real(&sq)
    }
}

/// Normalized one-variable Bessel function `j_a(z) = ₀F₁(a+1; -z²/4)`,
/// summed until the terms fall below machine precision.
pub fn bessel_1d(a: f64, z: Complex64) -> Result<Complex64> {
    if let Some(m) = nonpositive_integer(Complex64::new(a + 1.0, 0.0), 0.0) {
        return Err(Error::Pole {
            param: "a",
            location: a,
            j: 0,
            m: m + 1,
        });
    }
    let x = -z * z / 4.0;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut small = 0;
    for p in 1..10_000u32 {
        term = term * x / ((a + p as f64) * p as f64);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm().max(1e-300) {
            small += 1;
            if small >= 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
    Ok(sum)
}

/// Rank-one Dunkl kernel `E_k(x, z) = j_{k-1/2}(ixz) + xz/(2k+1) · j_{k+1/2}(ixz)`.
pub fn dunkl_kernel_1d(k: f64, x: f64, z: Complex64) -> Result<Complex64> {
    domain_check(k >= 0.0, || format!("k must be >= 0, got {k}"))?;
    let arg = Complex64::new(0.0, 1.0) * z * x;
    let even = bessel_1d(k - 0.5, arg)?;
    let odd = bessel_1d(k + 0.5, arg)?;
    Ok(even + z * x / (2.0 * k + 1.0) * odd)
}

/// Taylor coefficients in `x` of `E_k(x, z)` up to `degree`.
pub fn dunkl_kernel_1d_taylor(k: f64, z: Complex64, degree: usize) -> Result<Vec<Complex64>> {
    domain_check(k >= 0.0, || format!("k must be >= 0, got {k}"))?;
    Ok((0..=degree)
        .map(|m| {
            let p = (m / 2) as u32;
            let denom = 4f64.powi(p as i32) * rising_real(1.0, p);
            if m % 2 == 0 {
                z.powu(m as u32) / (denom * rising_real(k + 0.5, p))
            } else {
                z.powu(m as u32) / ((2.0 * k + 1.0) * denom * rising_real(k + 1.5, p))
            }
        })
        .collect())
}
