//! The Selberg integral as a meromorphic gamma product, the Sonine density
//! on the unit cube, and the classification of shifts against Σ(k₂).

use crate::error::{domain_check, Error, Result};
use crate::hypergeom::MultiplicityB;
use crate::special::{ln_gamma, nonpositive_integer, POLE_TOL};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use crate::integrate::SelbergParams;

/// Distance to the pole lattice below which a value is flagged as poorly
/// conditioned.
pub const NEAR_POLE: f64 = 1e-6;

/// Tolerance for membership in the discrete part of Σ(k₂).
pub const SIGMA_TOL: f64 = 1e-12;

/// Closed-form Selberg value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelbergValue {
    pub value: Complex64,
    /// `ln` of the value, accumulated from log-gamma terms.
    pub ln_value: Option<Complex64>,
    pub near_pole: bool,
}

fn lattice_distance(z: Complex64) -> f64 {
    if z.re > 0.5 {
        return f64::INFINITY;
    }
    let r = z.re.round().min(0.0);
    Complex64::new(z.re - r, z.im).norm()
}

/// `I_n(κ, μ, ν) = Π_j Γ(1+κj)/Γ(1+κ) · Γ(μ-κ(j-1)) Γ(ν-κ(j-1)) / Γ(μ+ν-κ(j-1))`.
///
/// Poles of the numerator are reported as [`Error::Pole`] with the smallest
/// lattice index `j` (0-based, location `jκ - m`). Zeros of `1/Γ` in the
/// denominator give the value 0.
pub fn selberg_in(p: &SelbergParams) -> Result<SelbergValue> {
    domain_check(p.n >= 1, || "dimension must be at least 1".into())?;
    domain_check(p.kappa >= 0.0 && p.kappa.is_finite(), || {
        format!("kappa must be >= 0, got {}", p.kappa)
    })?;
    for (name, z) in [("mu", p.mu), ("nu", p.nu)] {
        for j in 0..p.n {
            if let Some(m) = nonpositive_integer(z - p.kappa * j as f64, POLE_TOL) {
                return Err(Error::Pole {
                    param: name,
                    location: z.re,
                    j,
                    m,
                });
            }
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut near_pole = false;
    let lg = |z: Complex64| ln_gamma(z).expect("pole excluded above");
    for j in 1..=p.n {
        let shift = p.kappa * (j as f64 - 1.0);
        let (a, b) = (p.mu - shift, p.nu - shift);
        near_pole |= lattice_distance(a) < NEAR_POLE || lattice_distance(b) < NEAR_POLE;
        acc += lg(one * (1.0 + p.kappa * j as f64)) - lg(one * (1.0 + p.kappa));
        acc += lg(a) + lg(b);
        let c = p.mu + p.nu - shift;
        match ln_gamma(c) {
            Some(l) if lattice_distance(c) >= POLE_TOL => acc -= l,
            _ => {
                return Ok(SelbergValue {
                    value: Complex64::new(0.0, 0.0),
                    ln_value: None,
                    near_pole: true,
                })
            }
        }
    }
    Ok(SelbergValue {
        value: acc.exp(),
        ln_value: Some(acc),
        near_pole,
    })
}

/// Shorthand for real parameters.
pub fn selberg_in_real(n: usize, kappa: f64, mu: f64, nu: f64) -> Result<f64> {
    Ok(selberg_in(&SelbergParams::real(n, kappa, mu, nu))?.value.re)
}

/// The Sonine density
/// `f_{k,h}(x) = 2^n / I_n(k₂, μ(k), h) · Π (x_j²)^{k₁} (1-x_j²)^{h-k₂(n-1)-1} · Π_{i<j} |x_i² - x_j²|^{2k₂}`
/// on the open unit cube.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SonineDensity {
    pub k: MultiplicityB,
    pub h: Complex64,
    pub n: usize,
    ln_norm: Complex64,
}

impl SonineDensity {
    pub fn new(k: MultiplicityB, h: Complex64, n: usize) -> Result<Self> {
        domain_check(n >= 1, || "dimension must be at least 1".into())?;
        domain_check(h.re > -k.k1.re, || {
            format!("Re h must exceed -Re k1 = {}, got {h}", -k.k1.re)
        })?;
        let p = SelbergParams {
            n,
            kappa: k.k2,
            mu: k.mu(n),
            nu: h,
        };
        let norm = match selberg_in(&p) {
            Ok(v) => v,
            Err(Error::Pole { location, j, m, .. }) => {
                return Err(Error::Pole {
                    param: "h",
                    location,
                    j,
                    m,
                })
            }
            Err(e) => return Err(e),
        };
        let ln_i = norm.ln_value.ok_or_else(|| {
            Error::ParameterDomain(format!("normalizing Selberg integral vanishes at h = {h}"))
        })?;
        Ok(SonineDensity {
            k,
            h,
            n,
            ln_norm: Complex64::new(n as f64 * std::f64::consts::LN_2, 0.0) - ln_i,
        })
    }

    pub fn real(k1: f64, k2: f64, h: f64, n: usize) -> Result<Self> {
        SonineDensity::new(MultiplicityB::real(k1, k2)?, Complex64::new(h, 0.0), n)
    }

    /// Exponent of `(1 - x_j²)`.
    pub fn boundary_exponent(&self) -> Complex64 {
        self.h - self.k.k2 * (self.n as f64 - 1.0) - 1.0
    }

    /// Parameters of the Selberg density obtained after `u = x²`.
    pub fn selberg_params(&self) -> SelbergParams {
        SelbergParams {
            n: self.n,
            kappa: self.k.k2,
            mu: self.k.mu(self.n),
            nu: self.h,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.n {
            return Err(Error::Domain(format!(
                "expected {} coordinates, got {}",
                self.n,
                x.len()
            )));
        }
        if let Some(bad) = x.iter().find(|&&v| !(v > 0.0 && v < 1.0)) {
            return Err(Error::Domain(format!("coordinate {bad} not in (0, 1)")));
        }
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without the domain check, for quadrature nodes.
    pub fn eval_unchecked(&self, x: &[f64]) -> Complex64 {
        let e = self.boundary_exponent();
        let mut ln = self.ln_norm;
        for &v in x {
            let sq = v * v;
            ln += self.k.k1 * sq.ln() + e * (1.0 - sq).ln();
        }
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                let d = (x[i] * x[i] - x[j] * x[j]).abs();
                if d == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                ln += 2.0 * self.k.k2 * d.ln();
            }
        }
        ln.exp()
    }
}

/// Position of a shift `h` relative to
/// `Σ(k₂) = ]k₂(n-1), ∞[ ∪ ({0, k₂, ..., k₂(n-1)} - ℤ₊)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "membership")]
pub enum SigmaVerdict {
    ContinuousPart,
    /// `h = j k₂ - m`.
    DiscretePart { j: usize, m: u64 },
    Outside,
}

impl SigmaVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            SigmaVerdict::ContinuousPart => "ContinuousPart",
            SigmaVerdict::DiscretePart { .. } => "DiscretePart",
            SigmaVerdict::Outside => "Outside",
        }
    }

    pub fn in_sigma(&self) -> bool {
        !matches!(self, SigmaVerdict::Outside)
    }
}

pub fn sigma_classify(h: Complex64, k2: f64, n: usize) -> SigmaVerdict {
    if h.im.abs() > SIGMA_TOL {
        return SigmaVerdict::Outside;
    }
    let h = h.re;
    if h > k2 * (n as f64 - 1.0) {
        return SigmaVerdict::ContinuousPart;
    }
    for j in 0..n {
        let m = j as f64 * k2 - h;
        let r = m.round();
        if r >= 0.0 && (m - r).abs() <= SIGMA_TOL {
            return SigmaVerdict::DiscretePart { j, m: r as u64 };
        }
    }
    SigmaVerdict::Outside
}

/// Poles of `h ↦ I_n(k₂, μ(k), h)` in `[lo, hi]`, sorted and deduplicated.
pub fn pole_set(k2: f64, n: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    domain_check(lo <= hi, || format!("empty window [{lo}, {hi}]"))?;
    domain_check(k2 > 0.0, || format!("k2 must be positive, got {k2}"))?;
    let mut out = Vec::new();
    for j in 0..n {
        let top = j as f64 * k2;
        let m_min = (top - hi).ceil().max(0.0);
        let mut m = m_min;
        while top - m >= lo {
            out.push(top - m);
            m += 1.0;
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= SIGMA_TOL);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        assert!((selberg_in_real(1, 0.7, 2.0, 3.0).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        let v = selberg_in_real(2, 1.0, 2.0, 2.0).unwrap();
        assert!((v - 1.0 / 6.0).abs() < 1e-14, "{v}");
        match selberg_in_real(2, 1.0, 2.0, 1.0) {
            Err(Error::Pole { param, j, m, .. }) => {
                assert_eq!((param, j, m), ("nu", 1, 0));
            }
            other => panic!("expected pole, got {other:?}"),
        }
    }

    #[test]
    fn large_dimension_does_not_overflow() {
        let v = selberg_in_real(3, 2.5, 40.0, 35.0).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn sigma_examples() {
        let c = |x: f64| Complex64::new(x, 0.0);
        assert_eq!(sigma_classify(c(1.5), 1.0, 2), SigmaVerdict::ContinuousPart);
        assert_eq!(sigma_classify(c(0.5), 1.0, 2), SigmaVerdict::Outside);
        assert_eq!(
            sigma_classify(c(-2.0), 1.0, 2),
            SigmaVerdict::DiscretePart { j: 0, m: 2 }
        );
        assert_eq!(sigma_classify(Complex64::new(3.0, 0.1), 1.0, 2), SigmaVerdict::Outside);
    }

    #[test]
    fn pole_set_examples() {
        assert_eq!(pole_set(1.0, 2, -1.5, 1.5).unwrap(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(pole_set(0.5, 3, 0.0, 1.1).unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(pole_set(1.0, 2, 1.1, 1.9).unwrap().is_empty());
    }

    #[test]
    fn density_vanishes_on_diagonal_and_rejects_boundary() {
        let d = SonineDensity::real(0.5, 1.0, 1.5, 2).unwrap();
        assert_eq!(d.eval(&[0.4, 0.4]).unwrap(), Complex64::new(0.0, 0.0));
        assert!(matches!(d.eval(&[0.0, 0.4]), Err(Error::Domain(_))));
        assert!(matches!(d.eval(&[1.0, 0.4]), Err(Error::Domain(_))));
        assert!(d.eval(&[0.3, 0.7]).unwrap().re > 0.0);
    }

    #[test]
    fn density_pole_is_reported() {
        assert!(matches!(
            SonineDensity::real(0.0, 1.0, 1.0, 2),
            Err(Error::Pole { param: "h", .. })
        ));
    }
}
