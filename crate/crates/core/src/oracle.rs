//! Deliberately plain reference computations: a square-box theta sum with
//! compensated accumulation, central finite differences and an exhaustive
//! parity count. They share no code with the primary evaluation path.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Result, ThetaError};
use crate::torus::{CVec2, RealCharacteristic, SiegelMatrix};

pub const MAX_BOX_RADIUS: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleConfig {
    pub box_radius: u32,
    pub fd_step: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            box_radius: 20,
            fd_step: 1e-5,
        }
    }
}

impl OracleConfig {
    pub fn new(box_radius: u32, fd_step: f64) -> Result<Self> {
        if box_radius == 0 || box_radius > MAX_BOX_RADIUS {
            return Err(ThetaError::InvalidInput(format!(
                "box radius {box_radius} outside 1..={MAX_BOX_RADIUS}"
            )));
        }
        if !(1e-7..=1e-3).contains(&fd_step) {
            return Err(ThetaError::InvalidInput(format!("finite difference step {fd_step:e} outside [1e-7, 1e-3]")));
        }
        Ok(Self { box_radius, fd_step })
    }
}

/// Neumaier's compensated sum of real and imaginary parts separately.
#[derive(Default)]
struct CompensatedSum {
    sum: [f64; 2],
    carry: [f64; 2],
}

impl CompensatedSum {
    fn add(&mut self, t: Complex64) {
        for (k, x) in [t.re, t.im].into_iter().enumerate() {
            let s = self.sum[k] + x;
            if self.sum[k].abs() >= x.abs() {
                self.carry[k] += (self.sum[k] - s) + x;
            } else {
                self.carry[k] += (x - s) + self.sum[k];
            }
            self.sum[k] = s;
        }
    }

    fn total(&self) -> Complex64 {
        Complex64::new(self.sum[0] + self.carry[0], self.sum[1] + self.carry[1])
    }
}

/// `sum_{l in [-R, R]^2} exp(pi i (l+c1)^T Z (l+c1) + 2 pi i (v+c2)^T (l+c1))`.
///
/// # Panics
/// If `box_radius` exceeds [`MAX_BOX_RADIUS`].
pub fn direct_theta(z: &SiegelMatrix, ch: &RealCharacteristic, v: &CVec2, box_radius: u32) -> Complex64 {
    assert!(box_radius <= MAX_BOX_RADIUS, "box radius {box_radius} exceeds {MAX_BOX_RADIUS}");
    let zm = z.z();
    let r = box_radius as i64;
    let mut acc = CompensatedSum::default();
    for l1 in -r..=r {
        for l2 in -r..=r {
            let k = [l1 as f64 + ch.c1[0], l2 as f64 + ch.c1[1]];
            let mut quad = Complex64::new(0.0, 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    quad += zm[(i, j)] * (k[i] * k[j]);
                }
            }
            let lin = (v[0] + ch.c2[0]) * k[0] + (v[1] + ch.c2[1]) * k[1];
            acc.add((Complex64::i() * PI * (quad + lin * 2.0)).exp());
        }
    }
    acc.total()
}

/// Complex derivative in each coordinate from central differences along the
/// real and imaginary axes, `(d/dx - i d/dy) / 2`.
pub fn fd_gradient(z: &SiegelMatrix, ch: &RealCharacteristic, v: &CVec2, config: &OracleConfig) -> [Complex64; 2] {
    let h = config.fd_step;
    let f = |w: CVec2| direct_theta(z, ch, &w, config.box_radius);
    std::array::from_fn(|k| {
        let mut e = CVec2::zeros();
        e[k] = Complex64::new(h, 0.0);
        let dx = (f(v + e) - f(v - e)) / (2.0 * h);
        let ei = e * Complex64::i();
        let dy = (f(v + ei) - f(v - ei)) / (2.0 * h);
        (dx - Complex64::i() * dy) * 0.5
    })
}

/// `(even, odd)` counts over all `(c1, c2)` in `{0, 1/2}^4`, from the sign of
/// `4 c1 . c2` computed on the doubled integer entries.
pub fn enumerate_parities() -> (u32, u32) {
    let mut even = 0;
    let mut odd = 0;
    for bits in 0u32..16 {
        let b = [bits & 1, (bits >> 1) & 1, (bits >> 2) & 1, (bits >> 3) & 1];
        if (b[0] * b[2] + b[1] * b[3]) % 2 == 0 {
            even += 1;
        } else {
            odd += 1;
        }
    }
    (even, odd)
}

/// Parity of one doubled characteristic `[2 c1, 2 c2]`, by the same rule.
pub fn doubled_parity(b: [u8; 4]) -> i8 {
    if (b[0] * b[2] + b[1] * b[3]) % 2 == 0 {
        1
    } else {
        -1
    }
}
