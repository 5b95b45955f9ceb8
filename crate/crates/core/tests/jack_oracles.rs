//! Independent checks of the Jack polynomial tables.
//!
//! * α = 1: C_λ = |λ|!/H_λ · s_λ with s_λ from the bialternant formula.
//! * C_λ(1^n) from the arm/leg hook product.
//! * normalization, symmetry and positivity on random points.

use num_complex::Complex64;
use proptest::prelude::*;
use sonine::jack::{
    enumerate_partitions, gen_pochhammer, jack_c, jack_c_at_one, jack_c_real, Partition,
};

fn det(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut d = 1.0;
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())
            .unwrap();
        if a[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            a.swap(piv, c);
            d = -d;
        }
        d *= a[c][c];
        for r in (c + 1)..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    d
}

fn schur_bialternant(lam: &Partition, x: &[f64]) -> f64 {
    let n = x.len();
    let p = lam.padded(n);
    let num: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| x[i].powi((p[j] as usize + n - 1 - j) as i32)).collect())
        .collect();
    let den: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| x[i].powi((n - 1 - j) as i32)).collect())
        .collect();
    det(num) / det(den)
}

fn hook_product(lam: &Partition) -> f64 {
    let conj = lam.conjugate();
    let mut h = 1.0;
    for (i, &row) in lam.parts().iter().enumerate() {
        for j in 0..row as usize {
            let arm = row as usize - j - 1;
            let leg = conj.part(j) as usize - i - 1;
            h *= (arm + leg + 1) as f64;
        }
    }
    h
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn c_at_one_hook(lam: &Partition, alpha: f64, n: usize) -> f64 {
    let conj = lam.conjugate();
    let k = lam.weight();
    let mut num = alpha.powi(k as i32) * factorial(k);
    let mut den = 1.0;
    for (i, &row) in lam.parts().iter().enumerate() {
        for j in 0..row as usize {
            let arm = (row as usize - j - 1) as f64;
            let leg = (conj.part(j) as usize - i - 1) as f64;
            num *= n as f64 - i as f64 + alpha * j as f64;
            den *= (alpha * arm + leg + 1.0) * (alpha * (arm + 1.0) + leg);
        }
    }
    num / den
}

#[test]
fn alpha_one_is_scaled_schur() {
    let points = [[0.3, 1.7, -0.8], [1.1, 0.4, 2.2], [-1.3, 0.9, 0.6]];
    for m in 0..=7 {
        for lam in enumerate_partitions(m, 3) {
            for x in &points {
                let expected = factorial(m) / hook_product(&lam) * schur_bialternant(&lam, x);
                let got = jack_c_real(&lam, 1.0, x).unwrap();
                assert!(
                    (got - expected).abs() <= 1e-10 * expected.abs().max(1.0),
                    "λ = {lam}, x = {x:?}: {got} vs {expected}"
                );
            }
        }
    }
}

#[test]
fn value_at_one_matches_hook_formula() {
    for alpha in [0.5, 1.0, 2.0, 3.7] {
        for n in 1..=3 {
            for m in 0..=10 {
                for lam in enumerate_partitions(m, n) {
                    let expected = c_at_one_hook(&lam, alpha, n);
                    let got = jack_c_at_one(&lam, alpha, n).unwrap();
                    assert!(
                        (got - expected).abs() <= 1e-11 * expected,
                        "λ = {lam}, α = {alpha}, n = {n}: {got} vs {expected}"
                    );
                }
            }
        }
    }
}

#[test]
fn two_part_value_at_one_from_normalization() {
    // Σ_{|λ|=2} C_λ(1,1) = 4 with C_(1,1)(1,1) = 2α/(1+α) at α = 2.
    let c11 = jack_c_at_one(&Partition::new(vec![1, 1]).unwrap(), 2.0, 2).unwrap();
    let c2 = jack_c_at_one(&Partition::new(vec![2]).unwrap(), 2.0, 2).unwrap();
    assert!((c11 - 4.0 / 3.0).abs() < 1e-14);
    assert!((c2 - 8.0 / 3.0).abs() < 1e-14);
}

fn normalization_residual(m: u32, alpha: f64, x: &[f64]) -> f64 {
    let sum: f64 = enumerate_partitions(m, x.len())
        .iter()
        .map(|lam| jack_c_real(lam, alpha, x).unwrap())
        .sum();
    let target = x.iter().sum::<f64>().powi(m as i32);
    (sum - target).abs() / target.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_sum_normalization(
        m in 0u32..=8,
        alpha in prop::sample::select(vec![0.5, 1.0, 2.0]),
        x in prop::collection::vec(-2.0f64..2.0, 1..=3),
    ) {
        prop_assert!(normalization_residual(m, alpha, &x) <= 1e-10);
    }

    #[test]
    fn permutation_invariance(
        m in 1u32..=7,
        alpha in 0.2f64..4.0,
        x in prop::collection::vec(-2.0f64..2.0, 3),
    ) {
        let perms = [[0, 1, 2], [1, 0, 2], [2, 1, 0], [1, 2, 0]];
        for lam in enumerate_partitions(m, 3) {
            let base = jack_c_real(&lam, alpha, &x).unwrap();
            for p in perms {
                let y = [x[p[0]], x[p[1]], x[p[2]]];
                let v = jack_c_real(&lam, alpha, &y).unwrap();
                prop_assert!((v - base).abs() <= 1e-12 * base.abs().max(1.0));
            }
        }
    }

    #[test]
    fn positive_at_positive_points(
        m in 0u32..=8,
        alpha in 0.2f64..4.0,
        x in prop::collection::vec(0.01f64..3.0, 1..=3),
    ) {
        for lam in enumerate_partitions(m, x.len()) {
            prop_assert!(jack_c_real(&lam, alpha, &x).unwrap() > 0.0);
        }
    }

    #[test]
    fn complex_points_agree_with_real_part_for_real_input(
        alpha in 0.3f64..3.0,
        x in prop::collection::vec(-1.5f64..1.5, 2),
    ) {
        let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        for lam in enumerate_partitions(4, 2) {
            let c = jack_c(&lam, alpha, &xc).unwrap();
            prop_assert!(c.im.abs() < 1e-13);
        }
    }
}

/// (μ)_λ^α is a polynomial of degree |λ| in μ: Lagrange interpolation
/// through |λ|+1 nodes reproduces evaluations at fresh points.
#[test]
fn pochhammer_is_polynomial_in_mu() {
    for (parts, alpha) in [(vec![2, 1], 2.0), (vec![3, 2, 1], 0.7), (vec![4], 1.0)] {
        let lam = Partition::new(parts).unwrap();
        let deg = lam.weight() as usize;
        let nodes: Vec<f64> = (0..=deg).map(|i| -1.0 + 0.75 * i as f64).collect();
        let vals: Vec<Complex64> = nodes
            .iter()
            .map(|&t| gen_pochhammer(Complex64::new(t, 0.0), &lam, alpha))
            .collect();
        for fresh in [Complex64::new(0.37, 0.0), Complex64::new(-0.6, 0.8), Complex64::new(2.2, -0.3)] {
            let mut interp = Complex64::new(0.0, 0.0);
            for i in 0..=deg {
                let mut l = Complex64::new(1.0, 0.0);
                for j in 0..=deg {
                    if i != j {
                        l *= (fresh - nodes[j]) / (nodes[i] - nodes[j]);
                    }
                }
                interp += vals[i] * l;
            }
            let direct = gen_pochhammer(fresh, &lam, alpha);
            assert!((interp - direct).norm() <= 1e-10 * direct.norm().max(1.0));
        }
    }
}
