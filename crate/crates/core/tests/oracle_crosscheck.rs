//! The ellipsoidal evaluator against brute-force box sums and finite
//! differences.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use theta13::divisor::{theta_a_with_gradient, MINUS_OMEGA_CHAR, OMEGA_CHAR};
use theta13::oracle::{direct_theta, fd_gradient, OracleConfig};
use theta13::theta::{classical_theta, classical_theta_with_gradient};
use theta13::torus::{random_cell_point, two_torsion_points, CVec2, RealCharacteristic, SiegelMatrix};
use theta13::zeros::sample_curve_points_with;
use theta13::ThetaDivisor;

const EPS: f64 = 1e-12;

/// `theta_3(0, i) = pi^(1/4) / Gamma(3/4)`.
const THETA3_AT_I: f64 = 1.086_434_811_213_308;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn theta_constant_at_the_square_lattice() {
    let z = SiegelMatrix::diagonal(c(0., 1.), c(0., 1.)).unwrap();
    let ch = RealCharacteristic::new([0.; 2], [0.; 2]);
    let t = classical_theta(&z, &ch, &CVec2::zeros(), EPS).unwrap();
    assert!((t.value - THETA3_AT_I * THETA3_AT_I).norm() < 1e-13, "{}", t.value);
    assert!((t.value - 1.180340599).norm() < 1e-9);
    let brute = direct_theta(&z, &ch, &CVec2::zeros(), 20);
    assert!((t.value - brute).norm() < 1e-13);
}

#[test]
fn one_variable_factorisation_on_diagonal_matrices() {
    // For diagonal Z the lattice sum splits into two one-variable sums,
    // each evaluated here by hand.
    let (t1, t2) = (c(0.2, 0.8), c(-0.35, 1.3));
    let z = SiegelMatrix::diagonal(t1, t2).unwrap();
    let one_var = |tau: Complex64, a: f64, b: f64, w: Complex64| -> Complex64 {
        (-30..=30)
            .map(|n| {
                let k = n as f64 + a;
                (Complex64::i() * std::f64::consts::PI * (k * k * tau + 2.0 * k * (w + b))).exp()
            })
            .sum()
    };
    let v = CVec2::new(c(0.31, -0.2), c(0.77, 0.4));
    for ch in two_torsion_points() {
        let want = one_var(t1, ch.c1[0], ch.c2[0], v[0]) * one_var(t2, ch.c1[1], ch.c2[1], v[1]);
        let got = classical_theta(&z, &ch, &v, EPS).unwrap().value;
        assert!((got - want).norm() < 1e-11 * want.norm().max(1.0), "{ch:?}");
    }
}

#[test]
fn ellipsoid_sum_matches_box_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let chars = two_torsion_points();
    for _ in 0..40 {
        let z = SiegelMatrix::random(&mut rng);
        let ch = chars[rng.random_range(0..16)];
        let p = random_cell_point(&z, &mut rng);
        let v = p.v - z.z() * CVec2::new(c(0.5, 0.), c(0.5, 0.));
        let got = classical_theta(&z, &ch, &v, EPS).unwrap();
        let want = direct_theta(&z, &ch, &v, 20);
        let err = (got.value - want).norm() / want.norm().max(1.0);
        assert!(err < 1e-10, "relative error {err:e}");
    }
}

fn gradient_error(z: &SiegelMatrix, ch: &RealCharacteristic, v: &CVec2, h: f64) -> f64 {
    let (_, g) = classical_theta_with_gradient(z, ch, v, EPS).unwrap();
    let fd = fd_gradient(z, ch, v, &OracleConfig::new(20, h).unwrap());
    (0..2).map(|k| (g[k].value - fd[k]).norm()).fold(0.0, f64::max)
}

#[test]
fn finite_differences_converge_at_least_quadratically() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let z = SiegelMatrix::random(&mut rng);
    let ch = RealCharacteristic::new([0.5, 0.], [0., 0.5]);
    let v = random_cell_point(&z, &mut rng).v.scale(0.3);
    // The h^2 terms of the real and imaginary differences cancel for a
    // holomorphic function, so halving h gains close to a factor 16 until
    // rounding takes over near h = 5e-4.
    let coarse = gradient_error(&z, &ch, &v, 1e-3);
    let half = gradient_error(&z, &ch, &v, 5e-4);
    let fine = gradient_error(&z, &ch, &v, 1e-4);
    assert!(coarse / half > 4.0, "halving h gained only {}", coarse / half);
    assert!(fine < coarse / 10.0, "h = 1e-4 error {fine:e} against {coarse:e}");
}

#[test]
fn gradients_on_the_curve_match_finite_differences() {
    let z = SiegelMatrix::random(&mut ChaCha8Rng::seed_from_u64(8));
    let divisor = ThetaDivisor::new(z, EPS).unwrap();
    let sample = sample_curve_points_with(&divisor, 12, 3).unwrap();
    let config = OracleConfig::new(20, 1e-5).unwrap();
    for p in &sample.points {
        let (_, g) = theta_a_with_gradient(&z, &p.v, EPS).unwrap();
        let minus = fd_gradient(&z, &MINUS_OMEGA_CHAR, &p.v, &config);
        let plus = fd_gradient(&z, &OMEGA_CHAR, &p.v, &config);
        let norm = g.iter().map(|x| x.value.norm_sqr()).sum::<f64>().sqrt();
        let diff = (0..2).map(|k| (g[k].value - (minus[k] - plus[k])).norm_sqr()).sum::<f64>().sqrt();
        assert!(diff < 1e-5 * norm, "relative gradient error {:e}", diff / norm);
    }
}
