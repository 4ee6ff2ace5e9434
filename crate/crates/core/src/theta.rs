//! Riemann theta functions with real (classical) and complex (canonical)
//! characteristics, with certified truncation bounds.
//!
//! The classical series is summed over the lattice points inside an ellipse
//! `|l + a|_Y <= R` centred on the peak of the Gaussian envelope. The tail
//! outside the ellipse is bounded by packing disjoint discs of radius
//! `rho / 2` (with `rho = sqrt(lambda_min(Y))` a lower bound on the shortest
//! lattice vector in the `Y`-norm) around every omitted point and comparing the
//! sum against a radial Gaussian integral. Arguments are reduced into the
//! fundamental cell first and the exact quasi-periodicity multiplier is
//! restored afterwards, so the envelope prefactor stays bounded.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Result, ThetaError};
use crate::torus::{
    bilinear_form, from_real_coords, lattice_coords, random_cell_point, reduce_with_offset,
    riemann_form, to_real_coords, CVec2, RVec2, RealCharacteristic, SiegelMatrix, TorusPoint, D,
};

/// Default absolute truncation tolerance.
pub const DEFAULT_EPS: f64 = 1e-12;

const MAX_RADIUS: f64 = 1e4;
const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A theta value with a certified bound on the truncation error and a
/// floating-point rounding estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThetaValue {
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub value: Complex64,
    /// Upper bound on `|value - exact series|` from truncation alone.
    pub tail_bound: f64,
    /// Bound on accumulated rounding error in the evaluated terms and sum.
    pub round_bound: f64,
    pub radius_used: u32,
}

impl ThetaValue {
    pub fn error_bound(&self) -> f64 {
        self.tail_bound + self.round_bound
    }

    pub fn abs(&self) -> f64 {
        self.value.norm()
    }

    fn scaled(self, factor: Complex64, factor_rel_err: f64) -> Self {
        let f = factor.norm();
        Self {
            value: self.value * factor,
            tail_bound: self.tail_bound * f,
            round_bound: self.round_bound * f + self.value.norm() * f * factor_rel_err,
            radius_used: self.radius_used,
        }
    }

    /// `self - other` with combined error bounds.
    pub fn minus(&self, other: &ThetaValue) -> ThetaValue {
        let value = self.value - other.value;
        ThetaValue {
            value,
            tail_bound: self.tail_bound + other.tail_bound,
            round_bound: self.round_bound + other.round_bound + UNIT_ROUNDOFF * value.norm(),
            radius_used: self.radius_used.max(other.radius_used),
        }
    }
}

/// A complex characteristic `c = c1 + c2` with `c1 = Z a` in `Z R^2` and
/// `c2` real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexCharacteristic {
    /// Real preimage `a` of `c1` under `Z`.
    pub a: RVec2,
    pub c2: RVec2,
    pub c: CVec2,
}

impl ComplexCharacteristic {
    pub fn zero() -> Self {
        Self {
            a: RVec2::zeros(),
            c2: RVec2::zeros(),
            c: CVec2::zeros(),
        }
    }

    pub fn from_parts(z: &SiegelMatrix, a: RVec2, c2: RVec2) -> Self {
        let c1 = z.z() * a.map(|t| Complex64::new(t, 0.0));
        let c = c1 + c2.map(|t| Complex64::new(t, 0.0));
        Self { a, c2, c }
    }

    /// Decomposes an arbitrary point of `C^2`.
    pub fn from_point(z: &SiegelMatrix, c: CVec2) -> Self {
        let (x, y) = to_real_coords(z, &c);
        Self::from_parts(z, x, RVec2::new(D[0] * y[0], D[1] * y[1]))
    }

    /// The symmetric characteristic of the 2-torsion point `Z c1 + D c2`.
    pub fn from_two_torsion(z: &SiegelMatrix, ch: &RealCharacteristic) -> Self {
        Self::from_parts(
            z,
            ch.c1(),
            RVec2::new(D[0] * ch.c2[0], D[1] * ch.c2[1]),
        )
    }

    pub fn c1(&self, z: &SiegelMatrix) -> CVec2 {
        z.z() * self.a.map(|t| Complex64::new(t, 0.0))
    }

    pub fn c2_complex(&self) -> CVec2 {
        self.c2.map(|t| Complex64::new(t, 0.0))
    }
}

/// An element of `K(L)_1 = {0, omega, -omega}`, represented by
/// `Z (0, k/3)` with `k` in `{-1, 0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KernelShift(i8);

impl KernelShift {
    pub const ZERO: KernelShift = KernelShift(0);
    pub const OMEGA: KernelShift = KernelShift(1);
    pub const MINUS_OMEGA: KernelShift = KernelShift(-1);

    pub fn all() -> [KernelShift; 3] {
        [Self::ZERO, Self::OMEGA, Self::MINUS_OMEGA]
    }

    pub fn k(self) -> i8 {
        self.0
    }

    pub fn neg(self) -> Self {
        KernelShift(-self.0)
    }

    pub fn point(self, z: &SiegelMatrix) -> CVec2 {
        from_real_coords(z, &RVec2::new(0.0, self.0 as f64 / 3.0), &RVec2::zeros())
    }

    /// Recognises a point of `K(L)_1` modulo `Z Z^2`.
    pub fn from_point(p: &TorusPoint) -> Result<Self> {
        let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
        let x1 = p.x[0] - p.x[0].round();
        if !close(x1, 0.0) || !close(p.y[0], p.y[0].round()) || !close(p.y[1], 0.0) {
            return Err(ThetaError::EtaNotInKernel);
        }
        let t = 3.0 * p.x[1];
        if !close(t, t.round()) {
            return Err(ThetaError::EtaNotInKernel);
        }
        let k = (t.round() as i64).rem_euclid(3);
        Ok(KernelShift(match k {
            0 => 0,
            1 => 1,
            _ => -1,
        }))
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(ThetaError::InvalidEps(eps))
    }
}

/// Log of the bound on `sum_{|p| > r} (A|p| + B) exp(-pi |p|^2)` over a
/// shifted lattice of minimal distance at least `rho`. Valid for
/// `r >= rho + 1/2`.
fn ln_tail(r: f64, rho: f64, slope: f64, offset: f64) -> f64 {
    let s0 = r - rho;
    let bracket = slope * (r - rho / 2.0 + 0.5) + offset * (1.0 + PI * rho / 2.0);
    (4.0 / (PI * rho * rho)).ln() - PI * s0 * s0 + bracket.ln()
}

/// Smallest integer radius such that `exp(ln_prefactor) * tail <= eps` for
/// every `(slope, offset)` weight in `weights`.
fn radius_for(rho: f64, ln_prefactor: f64, eps: f64, weights: &[(f64, f64)]) -> Result<u32> {
    let ln_eps = eps.ln();
    let min_r = (rho + 0.5).ceil();
    // Gaussian part alone; the polynomial factor is absorbed by stepping.
    let excess = (ln_prefactor - ln_eps + (4.0 / (PI * rho * rho)).ln()).max(0.0);
    let mut r = (rho + (excess / PI).sqrt()).floor().max(min_r);
    loop {
        if r > MAX_RADIUS {
            return Err(ThetaError::EpsTooSmall { radius: r });
        }
        let worst = weights
            .iter()
            .map(|&(a, b)| ln_tail(r, rho, a, b))
            .fold(f64::NEG_INFINITY, f64::max);
        if ln_prefactor + worst <= ln_eps {
            return Ok(r as u32);
        }
        r += 1.0;
    }
}

fn ln_tail_value(r: u32, rho: f64, ln_prefactor: f64, slope: f64, offset: f64) -> f64 {
    (ln_prefactor + ln_tail(r as f64, rho, slope, offset)).exp()
}

/// Visits every `l` in `Z^2` with `(l + a)^T Y (l + a) <= r^2`.
fn for_each_in_ellipse(y: &Matrix2<f64>, y_inv: &Matrix2<f64>, a: &RVec2, r: f64, mut f: impl FnMut(f64, f64)) {
    let r2 = r * r;
    let (y11, y12, y22) = (y[(0, 0)], y[(0, 1)], y[(1, 1)]);
    let half2 = r * y_inv[(1, 1)].sqrt();
    let lo2 = (-a[1] - half2).ceil() as i64;
    let hi2 = (-a[1] + half2).floor() as i64;
    for l2 in lo2..=hi2 {
        let u2 = l2 as f64 + a[1];
        let disc = (y12 * u2).powi(2) - y11 * (y22 * u2 * u2 - r2);
        if disc < 0.0 {
            continue;
        }
        let sq = disc.sqrt();
        let lo1 = ((-y12 * u2 - sq) / y11 - a[0]).ceil() as i64;
        let hi1 = ((-y12 * u2 + sq) / y11 - a[0]).floor() as i64;
        for l1 in lo1..=hi1 {
            f(l1 as f64, l2 as f64);
        }
    }
}

/// `ln(exp(pi x^T Y x))`, the envelope maximum for `Im v = Y x`.
fn ln_envelope(y: &Matrix2<f64>, x: &RVec2) -> f64 {
    PI * (x.transpose() * y * x)[(0, 0)]
}

/// Truncation radius for the classical series at argument `v` (no lattice
/// reduction is applied here). The ellipse is centred on `c1 + Y^{-1} Im v`,
/// so the radius itself does not depend on `c1`.
pub fn truncation_radius(z: &SiegelMatrix, _c1: &RVec2, v: &CVec2, eps: f64) -> Result<u32> {
    check_eps(eps)?;
    let x = z.im_inv() * RVec2::new(v[0].im, v[1].im);
    radius_for(z.lambda_min().sqrt(), ln_envelope(z.im(), &x), eps, &[(0.0, 1.0)])
}

struct Series {
    value: ThetaValue,
    grad: Option<[ThetaValue; 2]>,
}

/// Sums the classical series at `v` directly, without reduction.
fn classical_series(
    z: &SiegelMatrix,
    ch: &RealCharacteristic,
    v: &CVec2,
    eps: f64,
    with_gradient: bool,
) -> Result<Series> {
    check_eps(eps)?;
    let y = z.im();
    let y_inv = z.im_inv();
    let c1 = ch.c1();
    let x = y_inv * RVec2::new(v[0].im, v[1].im);
    let centre = c1 + x;
    let rho = z.lambda_min().sqrt();
    let ln_p = ln_envelope(y, &x);

    let grad_weights = [(2.0 * PI / rho, 2.0 * PI * x[0].abs()), (2.0 * PI / rho, 2.0 * PI * x[1].abs())];
    let mut weights = vec![(0.0, 1.0)];
    if with_gradient {
        weights.extend_from_slice(&grad_weights);
    }
    let r = radius_for(rho, ln_p, eps, &weights)?;

    let zm = z.z();
    let (z11, z12, z22) = (zm[(0, 0)], zm[(0, 1)], zm[(1, 1)]);
    let w1 = v[0] + ch.c2[0];
    let w2 = v[1] + ch.c2[1];
    let mut sum = Complex64::new(0.0, 0.0);
    let mut g1 = Complex64::new(0.0, 0.0);
    let mut g2 = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut abs_g = [0.0f64; 2];
    let mut max_arg: f64 = 0.0;
    let mut count = 0usize;
    for_each_in_ellipse(y, y_inv, &centre, r as f64, |l1, l2| {
        let k1 = l1 + c1[0];
        let k2 = l2 + c1[1];
        let quad = z11 * (k1 * k1) + z12 * (2.0 * k1 * k2) + z22 * (k2 * k2);
        let lin = w1 * k1 + w2 * k2;
        let arg = I * PI * (quad + lin * 2.0);
        let t = arg.exp();
        let at = t.norm();
        sum += t;
        abs_sum += at;
        max_arg = max_arg.max(arg.norm());
        count += 1;
        if with_gradient {
            let tk = t * I * (2.0 * PI);
            g1 += tk * k1;
            g2 += tk * k2;
            abs_g[0] += at * 2.0 * PI * k1.abs();
            abs_g[1] += at * 2.0 * PI * k2.abs();
        }
    });
    let round_factor = 4.0 * UNIT_ROUNDOFF * (max_arg + count as f64 + 4.0);
    let value = ThetaValue {
        value: sum,
        tail_bound: ln_tail_value(r, rho, ln_p, 0.0, 1.0),
        round_bound: round_factor * abs_sum,
        radius_used: r,
    };
    let grad = with_gradient.then(|| {
        [(g1, 0), (g2, 1)].map(|(g, k)| ThetaValue {
            value: g,
            tail_bound: ln_tail_value(r, rho, ln_p, grad_weights[k].0, grad_weights[k].1),
            round_bound: round_factor * abs_g[k],
            radius_used: r,
        })
    });
    Ok(Series { value, grad })
}

/// Exponent of the multiplier `e_lambda(u)` in
/// `theta[c](u + Z m + D n) = e_lambda(u) theta[c](u)`:
/// `-pi i m^T Z m - 2 pi i m^T (u + c2) + 2 pi i c1^T D n`.
pub fn quasi_periodicity_exponent(
    z: &SiegelMatrix,
    ch: &RealCharacteristic,
    m: [i64; 2],
    n: [i64; 2],
    u: &CVec2,
) -> Complex64 {
    let mf = [m[0] as f64, m[1] as f64];
    let zm = z.z();
    let mzm = zm[(0, 0)] * (mf[0] * mf[0]) + zm[(0, 1)] * (2.0 * mf[0] * mf[1]) + zm[(1, 1)] * (mf[1] * mf[1]);
    let mu = (u[0] + ch.c2[0]) * mf[0] + (u[1] + ch.c2[1]) * mf[1];
    let c1dn = ch.c1[0] * D[0] * n[0] as f64 + ch.c1[1] * D[1] * n[1] as f64;
    -I * PI * mzm - I * (2.0 * PI) * mu + I * (2.0 * PI * c1dn)
}

pub fn quasi_periodicity_factor(
    z: &SiegelMatrix,
    ch: &RealCharacteristic,
    m: [i64; 2],
    n: [i64; 2],
    u: &CVec2,
) -> Complex64 {
    quasi_periodicity_exponent(z, ch, m, n, u).exp()
}

fn evaluate_reduced(
    z: &SiegelMatrix,
    ch: &RealCharacteristic,
    v: &CVec2,
    eps: f64,
    with_gradient: bool,
) -> Result<Series> {
    check_eps(eps)?;
    let red = reduce_with_offset(z, v);
    let u = red.point.v;
    let exponent = quasi_periodicity_exponent(z, ch, red.m, red.n, &u);
    // The restored value is |e| times the reduced one, so tighten eps there.
    let eps_reduced = if exponent.re > 0.0 { eps * (-exponent.re).exp() } else { eps };
    if eps_reduced <= 0.0 || !eps_reduced.is_normal() {
        return Err(ThetaError::EpsTooSmall { radius: f64::INFINITY });
    }
    let series = classical_series(z, ch, &u, eps_reduced, with_gradient)?;
    if red.m == [0, 0] && red.n == [0, 0] {
        return Ok(series);
    }
    let factor = exponent.exp();
    let factor_err = 4.0 * UNIT_ROUNDOFF * (exponent.norm() + 2.0);
    let value = series.value.scaled(factor, factor_err);
    let grad = series.grad.map(|g| {
        // d/dv [e(v - lambda) theta(v - lambda)] = e (grad theta - 2 pi i m theta)
        [0, 1].map(|k| {
            let mk = red.m[k] as f64;
            let corrected = g[k].value - I * (2.0 * PI * mk) * series.value.value;
            let base = ThetaValue {
                value: corrected,
                tail_bound: g[k].tail_bound + 2.0 * PI * mk.abs() * series.value.tail_bound,
                round_bound: g[k].round_bound
                    + 2.0 * PI * mk.abs() * series.value.round_bound
                    + UNIT_ROUNDOFF * corrected.norm(),
                radius_used: g[k].radius_used,
            };
            base.scaled(factor, factor_err)
        })
    });
    Ok(Series { value, grad })
}

/// Classical theta `theta[c1; c2](v, Z)` with `tail_bound <= eps`.
pub fn classical_theta(z: &SiegelMatrix, ch: &RealCharacteristic, v: &CVec2, eps: f64) -> Result<ThetaValue> {
    Ok(evaluate_reduced(z, ch, v, eps, false)?.value)
}

/// Value and `(d/dv1, d/dv2)` in a single pass over the lattice.
pub fn classical_theta_with_gradient(
    z: &SiegelMatrix,
    ch: &RealCharacteristic,
    v: &CVec2,
    eps: f64,
) -> Result<(ThetaValue, [ThetaValue; 2])> {
    let s = evaluate_reduced(z, ch, v, eps, true)?;
    Ok((s.value, s.grad.expect("gradient requested")))
}

pub fn classical_theta_gradient(
    z: &SiegelMatrix,
    ch: &RealCharacteristic,
    v: &CVec2,
    eps: f64,
) -> Result<[ThetaValue; 2]> {
    Ok(classical_theta_with_gradient(z, ch, v, eps)?.1)
}

/// The series summed at `v` as given, skipping lattice reduction. Used to
/// check the reduction multiplier independently.
pub fn classical_theta_unreduced(
    z: &SiegelMatrix,
    ch: &RealCharacteristic,
    v: &CVec2,
    eps: f64,
) -> Result<ThetaValue> {
    Ok(classical_series(z, ch, v, eps, false)?.value)
}

/// Relative residual of `theta(v + lambda) = e_lambda(v) theta(v)`, both
/// sides summed without reduction.
pub fn quasiperiodicity_residual(
    z: &SiegelMatrix,
    ch: &RealCharacteristic,
    lambda: &CVec2,
    v: &CVec2,
    eps: f64,
) -> Result<f64> {
    let (m, n) = lattice_coords(z, lambda)?;
    let shifted = classical_theta_unreduced(z, ch, &(v + lambda), eps)?.value;
    let base = classical_theta_unreduced(z, ch, v, eps)?.value * quasi_periodicity_factor(z, ch, m, n, v);
    let scale = shifted.norm().max(base.norm());
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((shifted - base).norm() / scale)
}

/// Canonical theta function of complex characteristic `c`:
///
/// `exp(-pi H(v,c) - pi/2 H(c,c) + pi/2 B(v+c,v+c))
///   * sum_{lambda in Z Z^2} exp(pi (H-B)(v+c, lambda) - pi/2 (H-B)(lambda, lambda))`.
pub fn canonical_theta(z: &SiegelMatrix, c: &ComplexCharacteristic, v: &CVec2, eps: f64) -> Result<ThetaValue> {
    check_eps(eps)?;
    let w = v + c.c;
    let prefactor_exp = -PI * riemann_form(z, v, &c.c) - PI / 2.0 * riemann_form(z, &c.c, &c.c)
        + PI / 2.0 * bilinear_form(z, &w, &w);
    let prefactor = prefactor_exp.exp();

    // |summand(m)| = exp(pi x^T Y x - pi |m - x|_Y^2) with x = Y^{-1} Im w.
    let x = z.im_inv() * RVec2::new(w[0].im, w[1].im);
    let rho = z.lambda_min().sqrt();
    let ln_p = ln_envelope(z.im(), &x) + prefactor_exp.re;
    let r = radius_for(rho, ln_p, eps, &[(0.0, 1.0)])?;

    let hb = |p: &CVec2, q: &CVec2| riemann_form(z, p, q) - bilinear_form(z, p, q);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut max_arg: f64 = 0.0;
    let mut count = 0usize;
    let centre = -x;
    for_each_in_ellipse(z.im(), z.im_inv(), &centre, r as f64, |m1, m2| {
        let lambda = z.z() * CVec2::new(Complex64::new(m1, 0.0), Complex64::new(m2, 0.0));
        let arg = PI * hb(&w, &lambda) - PI / 2.0 * hb(&lambda, &lambda);
        let t = arg.exp();
        sum += t;
        abs_sum += t.norm();
        max_arg = max_arg.max(arg.norm());
        count += 1;
    });
    let value = sum * prefactor;
    let round_factor = 4.0 * UNIT_ROUNDOFF * (max_arg + prefactor_exp.norm() + count as f64 + 8.0);
    Ok(ThetaValue {
        value,
        tail_bound: ln_tail_value(r, rho, ln_p, 0.0, 1.0),
        round_bound: round_factor * abs_sum * prefactor.norm(),
        radius_used: r,
    })
}

/// Canonical factor of automorphy extended to `K(L)_1` with the semicharacter
/// trivial on `Z R^2`: `a_L(eta, v) = exp(pi H(v, eta) + pi/2 H(eta, eta))`.
pub fn canonical_factor(z: &SiegelMatrix, eta: &CVec2, v: &CVec2) -> Complex64 {
    (PI * riemann_form(z, v, eta) + PI / 2.0 * riemann_form(z, eta, eta)).exp()
}

/// `theta^c_eta(v) = a_L(eta, v)^{-1} theta^c(v + eta)`.
pub fn canonical_theta_shifted(
    z: &SiegelMatrix,
    c: &ComplexCharacteristic,
    eta: KernelShift,
    v: &CVec2,
    eps: f64,
) -> Result<ThetaValue> {
    let e = eta.point(z);
    let inv = canonical_factor(z, &e, v).inv();
    let raw = canonical_theta(z, c, &(v + e), eps * inv.norm().recip().min(1.0).max(f64::MIN_POSITIVE))?;
    Ok(raw.scaled(inv, 8.0 * UNIT_ROUNDOFF))
}

/// The scalar `exp(4 pi i Im H(eta + c1, c2))` of the inverse formula.
pub fn inverse_formula_factor(z: &SiegelMatrix, c: &ComplexCharacteristic, eta: KernelShift) -> Complex64 {
    let lhs = eta.point(z) + c.c1(z);
    let im = riemann_form(z, &lhs, &c.c2_complex()).im;
    (I * (4.0 * PI * im)).exp()
}

/// Seeded sample of points in the fundamental cell, fixed per use site.
pub(crate) fn fixed_sample(z: &SiegelMatrix, seed: u64, n: usize) -> Vec<CVec2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_cell_point(z, &mut rng).v).collect()
}

const INVERSE_FORMULA_SEED: u64 = 0x1f0e_a5e5;
const EIGENSPACE_SEED: u64 = 0xe16e_5ace;

/// Largest per-point relative residual of
/// `theta^c_eta(-v) = exp(4 pi i Im H(eta + c1, c2)) theta^c_{-eta-2c1}(v)`
/// over a fixed sample of 20 points. Since `2 c1` lies in `Z Z^2`, the
/// shift `-eta - 2 c1` is the class of `-eta` in `K(L)_1`.
pub fn inverse_formula_residual(
    z: &SiegelMatrix,
    c: &ComplexCharacteristic,
    eta: KernelShift,
    eps: f64,
) -> Result<f64> {
    let factor = inverse_formula_factor(z, c, eta);
    let mut worst: f64 = 0.0;
    for v in fixed_sample(z, INVERSE_FORMULA_SEED, 20) {
        let lhs = canonical_theta_shifted(z, c, eta, &(-v), eps)?.value;
        let rhs = factor * canonical_theta_shifted(z, c, eta.neg(), &v, eps)?.value;
        let scale = lhs.norm().max(rhs.norm());
        if scale > 0.0 {
            worst = worst.max((lhs - rhs).norm() / scale);
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenspaceAnalysis {
    pub h_plus: usize,
    pub h_minus: usize,
    /// Singular values of the symmetrised sample matrices, relative to the largest.
    pub sv_plus: Vec<f64>,
    pub sv_minus: Vec<f64>,
}

const RANK_THRESHOLD: f64 = 1e-8;
const AMBIGUOUS_BAND: (f64, f64) = (1e-10, 1e-6);

fn relative_singular_values(m: DMatrix<Complex64>) -> Vec<f64> {
    let sv = m.svd(false, false).singular_values;
    let mut sv: Vec<f64> = sv.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return sv;
    }
    sv.iter().map(|s| s / top).collect()
}

/// Evaluates the basis `theta^c_0, theta^c_omega, theta^c_{-omega}` at 12
/// sample points and their negatives, forms `f(v) +- f(-v)` and returns the
/// numerical ranks of the two `3 x 12` matrices.
pub fn eigenspace_analysis(z: &SiegelMatrix, c: &ComplexCharacteristic, eps: f64) -> Result<EigenspaceAnalysis> {
    let pts = fixed_sample(z, EIGENSPACE_SEED, 12);
    let shifts = KernelShift::all();
    let mut plus = DMatrix::<Complex64>::zeros(3, pts.len());
    let mut minus = DMatrix::<Complex64>::zeros(3, pts.len());
    for (j, v) in pts.iter().enumerate() {
        let mut at_v = [Complex64::new(0.0, 0.0); 3];
        let mut at_neg = [Complex64::new(0.0, 0.0); 3];
        for (i, eta) in shifts.iter().enumerate() {
            at_v[i] = canonical_theta_shifted(z, c, *eta, v, eps)?.value;
            at_neg[i] = canonical_theta_shifted(z, c, *eta, &(-v), eps)?.value;
        }
        let norm = at_v.iter().chain(at_neg.iter()).map(|t| t.norm()).fold(0.0, f64::max);
        let norm = if norm > 0.0 { norm } else { 1.0 };
        for i in 0..3 {
            plus[(i, j)] = (at_v[i] + at_neg[i]) / norm;
            minus[(i, j)] = (at_v[i] - at_neg[i]) / norm;
        }
    }
    let sv_plus = relative_singular_values(plus);
    let sv_minus = relative_singular_values(minus);
    for s in sv_plus.iter().chain(sv_minus.iter()) {
        if (AMBIGUOUS_BAND.0..=AMBIGUOUS_BAND.1).contains(s) {
            return Err(ThetaError::RankAmbiguous {
                singular_values: sv_plus.iter().chain(sv_minus.iter()).copied().collect(),
            });
        }
    }
    let rank = |sv: &[f64]| sv.iter().filter(|s| **s > RANK_THRESHOLD).count();
    Ok(EigenspaceAnalysis {
        h_plus: rank(&sv_plus),
        h_minus: rank(&sv_minus),
        sv_plus,
        sv_minus,
    })
}

/// Dimensions `(h0_+, h0_-)` of the `(+-1)`-eigenspaces of `(-1)^*` on
/// `H^0(L)` for a symmetric characteristic.
pub fn eigenspace_dims(z: &SiegelMatrix, c: &ComplexCharacteristic, eps: f64) -> Result<(usize, usize)> {
    let a = eigenspace_analysis(z, c, eps)?;
    Ok((a.h_plus, a.h_minus))
}
