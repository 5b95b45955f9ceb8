//! Gamma-type special functions on the complex plane.
//!
//! `ln_gamma` uses the Lanczos approximation (g = 7, nine coefficients) on
//! the right half plane and the reflection formula on the left. Products of
//! gamma functions are accumulated in log space and exponentiated once.

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Distance below which an argument is treated as sitting on a pole.
pub const POLE_TOL: f64 = 1e-9;

/// If `z` is (within `tol`) a nonpositive integer `-m`, returns `m`.
pub fn nonpositive_integer(z: Complex64, tol: f64) -> Option<u64> {
    if z.im.abs() > tol || z.re > tol {
        return None;
    }
    let r = z.re.round();
    if (z.re - r).abs() <= tol {
        Some((-r).max(0.0) as u64)
    } else {
        None
    }
}

/// Principal-ish branch of log Γ(z). The imaginary part is only defined
/// modulo 2π, which is harmless once the result is exponentiated.
///
/// Returns `None` at the poles z = 0, -1, -2, ...
pub fn ln_gamma(z: Complex64) -> Option<Complex64> {
    if nonpositive_integer(z, 0.0).is_some() {
        return None;
    }
    if z.re < 0.5 {
        // Γ(z)Γ(1-z) = π / sin(πz)
        let s = (z * PI).sin();
        if s.norm() == 0.0 {
            return None;
        }
        let rest = ln_gamma(Complex64::new(1.0, 0.0) - z)?;
        return Some(Complex64::new(PI.ln(), 0.0) - s.ln() - rest);
    }
    let z = z - 1.0;
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Some(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln())
}

pub fn ln_gamma_real(x: f64) -> Option<f64> {
    ln_gamma(Complex64::new(x, 0.0)).map(|v| v.re)
}

pub fn gamma(z: Complex64) -> Option<Complex64> {
    ln_gamma(z).map(|l| l.exp())
}

/// Real gamma function with sign; `None` at poles.
pub fn gamma_real(x: f64) -> Option<f64> {
    gamma(Complex64::new(x, 0.0)).map(|v| v.re)
}

/// 1/Γ(z), entire; zero at the poles of Γ.
pub fn rgamma(z: Complex64) -> Complex64 {
    match ln_gamma(z) {
        Some(l) => (-l).exp(),
        None => Complex64::new(0.0, 0.0),
    }
}

/// Euler Beta function B(a, b) for real arguments.
pub fn beta(a: f64, b: f64) -> f64 {
    let l = ln_gamma_real(a).unwrap_or(f64::NAN) + ln_gamma_real(b).unwrap_or(f64::NAN)
        - ln_gamma_real(a + b).unwrap_or(f64::NAN);
    // ln_gamma_real returns log|Γ| only for positive arguments; Beta is only
    // used with positive parameters.
    l.exp()
}

/// Rising factorial (x)_m = x (x+1) ... (x+m-1).
pub fn rising(x: Complex64, m: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for i in 0..m {
        acc *= x + i as f64;
    }
    acc
}

pub fn rising_real(x: f64, m: u32) -> f64 {
    (0..m).fold(1.0, |acc, i| acc * (x + i as f64))
}

/// Pairwise (tree) summation in a fixed order.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn pairwise_sum_real(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_real(&values[..mid]) + pairwise_sum_real(&values[mid..])
}
