use num_complex::Complex64;
use sonine::hypergeom::MultiplicityB;
use sonine::integrate::{IntegrationSpec, SelbergParams};
use sonine::jack::{enumerate_partitions_upto, Partition};
use sonine::rankone::sonine_1d;
use sonine::verify::*;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn gj(nodes: usize) -> IntegrationSpec {
    IntegrationSpec::gauss_jacobi(nodes, 0.0, 0.0)
}

#[test]
fn kadell_rank_one_is_exact() {
    for lam in enumerate_partitions_upto(6, 1) {
        for &(alpha, mu, nu) in &[(1.0, 2.0, 3.0), (0.7, 0.4, 1.9), (3.0, 5.5, 0.6)] {
            let r = verify_kadell(alpha, mu, nu, &lam, 1, &gj(24), None).unwrap();
            assert!(r.passed && r.rel_residual < 1e-12, "{lam} {r:?}");
        }
    }
}

#[test]
fn kadell_rank_two_with_monte_carlo_cross_check() {
    for &alpha in &[1.0, 2.0] {
        for lam in enumerate_partitions_upto(4, 2) {
            let (mu, nu) = (2.5, 2.5);
            let r = verify_kadell(alpha, mu, nu, &lam, 2, &gj(96), None).unwrap();
            assert!(r.passed && r.rel_residual <= 1e-3, "{lam} alpha={alpha}: {r:?}");
            let mc = kadell_monte_carlo(alpha, mu, nu, &lam, 2, 1 << 16, 7).unwrap();
            let gap = (mc.mean - r.lhs).norm();
            assert!(gap <= 3.0 * mc.standard_error.max(1e-15) + 1e-3 * r.rhs.norm(), "{lam}: {gap:e} vs se {:e}", mc.standard_error);
        }
    }
    // lam = (1,0), alpha = 2, mu = nu = 2.5 gives exactly 1/2.
    let lam = Partition::new(vec![1]).unwrap();
    let r = verify_kadell(2.0, 2.5, 2.5, &lam, 2, &gj(96), None).unwrap();
    assert!((r.rhs.re - 0.5).abs() < 1e-15 && r.passed);
}

#[test]
fn kadell_monte_carlo_method_agrees() {
    let lam = Partition::new(vec![2, 1]).unwrap();
    let spec = IntegrationSpec::monte_carlo(1 << 16, 99);
    let r = verify_kadell(2.0, 2.0, 3.0, &lam, 2, &spec, Some(0.05)).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn kadell_residual_shrinks_with_nodes() {
    let lam = Partition::new(vec![2, 1]).unwrap();
    let res: Vec<f64> = [12, 24, 48, 96]
        .iter()
        .map(|&n| verify_kadell(2.0, 1.7, 2.2, &lam, 2, &gj(n), None).unwrap().abs_residual)
        .collect();
    for w in res.windows(2) {
        assert!(w[1] <= w[0] * 1.05 || w[1] < 1e-13, "{res:?}");
    }
}

#[test]
fn selberg_report() {
    let p = SelbergParams::real(2, 1.0, 2.0, 2.0);
    let r = verify_selberg(&p, &gj(16), None).unwrap();
    assert!(r.passed && (r.lhs.re - 1.0 / 6.0).abs() < 1e-14);
}

#[test]
fn sonine_0f1_examples() {
    let r = verify_sonine_0f1(1.0, 2.0, 2.0, &[c(0.0), c(0.0)], &gj(32), None).unwrap();
    assert!((r.lhs - 1.0).norm() < 1e-15 && (r.rhs - 1.0).norm() < 1e-13);
    let r = verify_sonine_0f1(1.0, 2.0, 2.0, &[c(-0.25), c(-0.5)], &gj(96), None).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn sonine_0f1_rank_one_is_classical() {
    for &(mu, nu, t) in &[(1.5, 1.0, 1.0), (0.7, 2.3, 2.5), (2.0, 0.5, 3.0)] {
        let r = verify_sonine_0f1(1.3, mu, nu, &[c(-t * t / 4.0)], &gj(40), None).unwrap();
        assert!(r.passed && r.rel_residual < 1e-8, "{r:?}");
        let classical = sonine_1d(mu - 1.0, nu, c(t), &gj(40)).unwrap();
        assert!((classical.lhs - r.lhs).norm() < 1e-12);
        assert!((classical.rhs - r.rhs).norm() < 1e-9);
    }
}

const XI: [[f64; 2]; 5] = [[0.3, 1.7], [1.0, 0.5], [2.0, 2.0], [1.4, 0.0], [0.8, 1.1]];

#[test]
fn sonine_rank_two_continuous_part() {
    let k = MultiplicityB::real(0.5, 1.0).unwrap();
    for &h in &[1.5, 2.0] {
        for xi in XI {
            let r = verify_sonine_bessel_b(&k, h, &xi, &gj(96), None).unwrap();
            assert!(r.passed, "h={h} xi={xi:?}: {r:?}");
            // Same identity through the 0F1 form: z = ξ²/4, μ = μ(k), ν = h.
            let z = [c(xi[0] * xi[0] / 4.0), c(xi[1] * xi[1] / 4.0)];
            let s = verify_sonine_0f1(1.0, 2.0, h, &z, &gj(96), None).unwrap();
            assert!(s.passed, "{s:?}");
            assert!((s.lhs - r.lhs).norm() < 1e-9 * r.lhs.norm(), "{} vs {}", s.lhs, r.lhs);
        }
    }
}

#[test]
fn sonine_bessel_b_monte_carlo_cross_check() {
    let k = MultiplicityB::real(0.5, 1.0).unwrap();
    let q = verify_sonine_bessel_b(&k, 1.5, &[1.0, 0.5], &gj(96), None).unwrap();
    let mc = verify_sonine_bessel_b(&k, 1.5, &[1.0, 0.5], &IntegrationSpec::monte_carlo(1 << 16, 3), Some(1e-2))
        .unwrap();
    assert!(mc.passed, "{mc:?}");
    assert!((q.rhs - mc.rhs).norm() < 1e-2);
}

#[test]
fn sonine_bessel_b_rank_one() {
    // k₁ = 0, h = 1 lands on sinh x / x.
    let k = MultiplicityB::real(0.0, 0.8).unwrap();
    let r = verify_sonine_bessel_b(&k, 1.0, &[1.3], &gj(40), None).unwrap();
    assert!((r.lhs.re - 1.3f64.sinh() / 1.3).abs() < 1e-12, "{r:?}");
    assert!(r.passed && r.rel_residual < 1e-8);
    let r = verify_sonine_bessel_b(&k, 1.0, &[0.0], &gj(40), None).unwrap();
    assert!((r.lhs - 1.0).norm() < 1e-15 && (r.rhs - 1.0).norm() < 1e-12);
}

#[test]
fn probe_dichotomy_and_exponents() {
    for &k2 in &[0.5, 1.0] {
        for &k1 in &[0.0, 0.5] {
            let k = MultiplicityB::real(k1, k2).unwrap();
            let edge = k2;
            let up = probe_integrability(&k, c(edge + 0.5), 2, 8).unwrap();
            assert_eq!(up.verdict, ProbeVerdict::Convergent, "{up:?}");
            assert!((up.fitted_exponent - up.expected_exponent).abs() < 0.1);
            let down = probe_integrability(&k, c(edge - 0.5), 2, 8).unwrap();
            assert_eq!(down.verdict, ProbeVerdict::Divergent, "{down:?}");
            assert!((down.fitted_exponent - down.expected_exponent).abs() < 0.1);
        }
    }
    // Rank one crosses over at h = 0.
    let k = MultiplicityB::real(0.0, 1.0).unwrap();
    assert_eq!(probe_integrability(&k, c(0.3), 1, 8).unwrap().verdict, ProbeVerdict::Convergent);
    assert_eq!(probe_integrability(&k, c(-0.3), 1, 8).unwrap().verdict, ProbeVerdict::Divergent);
    assert!(probe_integrability(&k, c(0.3), 1, 5).is_err());
}

#[test]
fn outside_sigma_with_complex_shift_reports_failure_mode() {
    let k = MultiplicityB::real(0.5, 1.0).unwrap();
    let r = classify_and_report(&k, Complex64::new(0.5, 0.7), 2).unwrap();
    assert!(!r.positive_measure_possible);
    assert_eq!(r.probe.verdict, ProbeVerdict::Divergent);
}
