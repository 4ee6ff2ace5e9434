//! Lattice, coordinate and torsion arithmetic on `A_Z = C^2 / (Z Z^2 + D Z^2)`
//! with `D = diag(1, 3)`.
//!
//! Every point `v` of `C^2` has unique real coordinates `(x, y)` with
//! `v = Z x + D y`; the lattice is the set of points with integral
//! coordinates, and the fundamental cell is `[0,1)^4` in these coordinates.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Result, ThetaError};

pub type CVec2 = Vector2<Complex64>;
pub type RVec2 = Vector2<f64>;

/// Elementary divisors of the polarisation used throughout.
pub const D: [f64; 2] = [1.0, 3.0];

const PD_TOLERANCE: f64 = 1e-10;
const TIE_TOLERANCE: f64 = 1e-12;

/// A point of the Siegel upper half space of degree 2.
///
/// Only the three independent entries are stored; `Im Z`, its inverse and
/// extreme eigenvalues are cached at construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SiegelMatrix {
    z: Matrix2<Complex64>,
    y: Matrix2<f64>,
    y_inv: Matrix2<f64>,
    lambda_min: f64,
    lambda_max: f64,
}

impl SiegelMatrix {
    pub fn new(z11: Complex64, z12: Complex64, z22: Complex64) -> Result<Self> {
        let y = Matrix2::new(z11.im, z12.im, z12.im, z22.im);
        let (lambda_min, lambda_max) = sym_eigenvalues(&y);
        if !(lambda_min > PD_TOLERANCE) {
            return Err(ThetaError::NotPositiveDefinite { lambda_min });
        }
        let det = y[(0, 0)] * y[(1, 1)] - y[(0, 1)] * y[(1, 0)];
        let y_inv = Matrix2::new(y[(1, 1)], -y[(0, 1)], -y[(1, 0)], y[(0, 0)]) / det;
        Ok(Self {
            z: Matrix2::new(z11, z12, z12, z22),
            y,
            y_inv,
            lambda_min,
            lambda_max,
        })
    }

    /// Diagonal period matrix `diag(tau1, tau2)`, the product case `E x F`.
    pub fn diagonal(tau1: Complex64, tau2: Complex64) -> Result<Self> {
        Self::new(tau1, Complex64::new(0.0, 0.0), tau2)
    }

    pub fn z(&self) -> &Matrix2<Complex64> {
        &self.z
    }

    pub fn im(&self) -> &Matrix2<f64> {
        &self.y
    }

    pub fn im_inv(&self) -> &Matrix2<f64> {
        &self.y_inv
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// `(z11, z12, z22)`.
    pub fn entries(&self) -> [Complex64; 3] {
        [self.z[(0, 0)], self.z[(0, 1)], self.z[(1, 1)]]
    }

    pub fn is_diagonal(&self) -> bool {
        self.z[(0, 1)].norm() == 0.0
    }

    /// Draws `Re Z` entries uniformly from `[-1/2, 1/2]` and sets
    /// `Im Z = Q^T Q + 0.3 I` with `Q` uniform in `[-1, 1]^{2x2}`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let re: [f64; 3] = std::array::from_fn(|_| rng.random_range(-0.5..=0.5));
        let q = Matrix2::from_fn(|_, _| rng.random_range(-1.0..=1.0));
        let y = q.transpose() * q + Matrix2::identity() * 0.3;
        Self::new(
            Complex64::new(re[0], y[(0, 0)]),
            Complex64::new(re[1], y[(0, 1)]),
            Complex64::new(re[2], y[(1, 1)]),
        )
        .expect("Q^T Q + 0.3 I is positive definite")
    }
}

/// Validated constructor, the free-function spelling of [`SiegelMatrix::new`].
pub fn make_siegel(z11: Complex64, z12: Complex64, z22: Complex64) -> Result<SiegelMatrix> {
    SiegelMatrix::new(z11, z12, z22)
}

fn sym_eigenvalues(m: &Matrix2<f64>) -> (f64, f64) {
    let half_tr = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let half_diff = 0.5 * (m[(0, 0)] - m[(1, 1)]);
    let r = half_diff.hypot(m[(0, 1)]);
    (half_tr - r, half_tr + r)
}

/// Polarisation type `(d1, d2)` with `d1 | d2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PolarizationType {
    pub d1: u32,
    pub d2: u32,
}

impl PolarizationType {
    pub const ONE_THREE: PolarizationType = PolarizationType { d1: 1, d2: 3 };

    pub fn new(d1: u32, d2: u32) -> Result<Self> {
        if d1 == 0 || d2 == 0 || d2 % d1 != 0 {
            return Err(ThetaError::InvalidPolarization { d1, d2 });
        }
        Ok(Self { d1, d2 })
    }

    /// Arithmetic genus `1 + d1 d2` of a curve in the polarising class.
    pub fn genus(&self) -> u32 {
        1 + self.d1 * self.d2
    }

    /// Order `d1^2 d2^2` of the kernel `K(L)` of the polarisation.
    pub fn kernel_order(&self) -> u32 {
        (self.d1 * self.d2).pow(2)
    }
}

/// A real characteristic `(c1, c2)`, also used to name the point `Z c1 + D c2`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RealCharacteristic {
    pub c1: [f64; 2],
    pub c2: [f64; 2],
}

impl RealCharacteristic {
    pub const ZERO: RealCharacteristic = RealCharacteristic {
        c1: [0.0; 2],
        c2: [0.0; 2],
    };

    pub fn new(c1: [f64; 2], c2: [f64; 2]) -> Self {
        Self { c1, c2 }
    }

    pub fn c1(&self) -> RVec2 {
        RVec2::new(self.c1[0], self.c1[1])
    }

    pub fn c2(&self) -> RVec2 {
        RVec2::new(self.c2[0], self.c2[1])
    }

    /// The point `Z c1 + D c2` of `C^2`.
    pub fn point(&self, z: &SiegelMatrix) -> CVec2 {
        from_real_coords(z, &self.c1(), &self.c2())
    }

    /// `2 (c1, c2)` as bits, when every entry is 0 or 1/2.
    pub fn doubled_bits(&self) -> Option<[u8; 4]> {
        let entries = [self.c1[0], self.c1[1], self.c2[0], self.c2[1]];
        let mut bits = [0u8; 4];
        for (bit, e) in bits.iter_mut().zip(entries) {
            *bit = if e == 0.0 {
                0
            } else if e == 0.5 {
                1
            } else {
                return None;
            };
        }
        Some(bits)
    }
}

impl std::fmt::Display for RealCharacteristic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({},{};{},{})",
            self.c1[0], self.c1[1], self.c2[0], self.c2[1]
        )
    }
}

/// A point of `C^2` with its real coordinates, `v = Z x + D y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusPoint {
    pub v: CVec2,
    pub x: RVec2,
    pub y: RVec2,
}

impl TorusPoint {
    pub fn from_complex(z: &SiegelMatrix, v: CVec2) -> Self {
        let (x, y) = to_real_coords(z, &v);
        Self { v, x, y }
    }

    pub fn from_real(z: &SiegelMatrix, x: RVec2, y: RVec2) -> Self {
        Self {
            v: from_real_coords(z, &x, &y),
            x,
            y,
        }
    }

    /// `[x1, x2, y1, y2]`.
    pub fn coords(&self) -> [f64; 4] {
        [self.x[0], self.x[1], self.y[0], self.y[1]]
    }

    pub fn origin() -> Self {
        Self {
            v: CVec2::zeros(),
            x: RVec2::zeros(),
            y: RVec2::zeros(),
        }
    }
}

/// Hermitian Riemann form `H(v, w) = v^T (Im Z)^{-1} conj(w)`.
pub fn riemann_form(z: &SiegelMatrix, v: &CVec2, w: &CVec2) -> Complex64 {
    let yi = z.im_inv();
    let wc = w.map(|c| c.conj());
    form(yi, v, &wc)
}

/// Complex-bilinear extension `B(v, w) = v^T (Im Z)^{-1} w`.
pub fn bilinear_form(z: &SiegelMatrix, v: &CVec2, w: &CVec2) -> Complex64 {
    form(z.im_inv(), v, w)
}

fn form(m: &Matrix2<f64>, v: &CVec2, w: &CVec2) -> Complex64 {
    let mw0 = w[0] * m[(0, 0)] + w[1] * m[(0, 1)];
    let mw1 = w[0] * m[(1, 0)] + w[1] * m[(1, 1)];
    v[0] * mw0 + v[1] * mw1
}

/// Solves `v = Z x + D y` for real `x, y`.
pub fn to_real_coords(z: &SiegelMatrix, v: &CVec2) -> (RVec2, RVec2) {
    let im = RVec2::new(v[0].im, v[1].im);
    let x = z.im_inv() * im;
    let re_z = z.z().map(|c| c.re);
    let rest = RVec2::new(v[0].re, v[1].re) - re_z * x;
    (x, RVec2::new(rest[0] / D[0], rest[1] / D[1]))
}

pub fn from_real_coords(z: &SiegelMatrix, x: &RVec2, y: &RVec2) -> CVec2 {
    let zx = z.z() * x.map(|t| Complex64::new(t, 0.0));
    CVec2::new(
        zx[0] + Complex64::new(D[0] * y[0], 0.0),
        zx[1] + Complex64::new(D[1] * y[1], 0.0),
    )
}

/// `Z m + D n`.
pub fn lattice_vector(z: &SiegelMatrix, m: [i64; 2], n: [i64; 2]) -> CVec2 {
    from_real_coords(
        z,
        &RVec2::new(m[0] as f64, m[1] as f64),
        &RVec2::new(n[0] as f64, n[1] as f64),
    )
}

/// Result of reducing a point into the fundamental cell.
#[derive(Clone, Copy, Debug)]
pub struct LatticeReduction {
    /// Representative with coordinates in `[0,1)^4`.
    pub point: TorusPoint,
    /// Offset `lambda = Z m + D n` with `v = point.v + lambda`.
    pub m: [i64; 2],
    pub n: [i64; 2],
}

pub(crate) fn split_unit(t: f64) -> (i64, f64) {
    let fl = t.floor();
    let mut frac = t - fl;
    let mut k = fl as i64;
    if frac >= 1.0 - TIE_TOLERANCE {
        frac = 0.0;
        k += 1;
    }
    (k, frac.max(0.0))
}

pub fn reduce_with_offset(z: &SiegelMatrix, v: &CVec2) -> LatticeReduction {
    let (x, y) = to_real_coords(z, v);
    let (m0, x0) = split_unit(x[0]);
    let (m1, x1) = split_unit(x[1]);
    let (n0, y0) = split_unit(y[0]);
    let (n1, y1) = split_unit(y[1]);
    let m = [m0, m1];
    let n = [n0, n1];
    // Subtract the lattice vector directly so that v - lambda is exact to
    // rounding rather than rebuilt from truncated coordinates.
    let reduced = v - lattice_vector(z, m, n);
    LatticeReduction {
        point: TorusPoint {
            v: reduced,
            x: RVec2::new(x0, x1),
            y: RVec2::new(y0, y1),
        },
        m,
        n,
    }
}

pub fn reduce_mod_lattice(z: &SiegelMatrix, v: &CVec2) -> TorusPoint {
    reduce_with_offset(z, v).point
}

/// Real coordinates of a lattice vector, or `NotLatticeVector`.
pub fn lattice_coords(z: &SiegelMatrix, lambda: &CVec2) -> Result<([i64; 2], [i64; 2])> {
    let (x, y) = to_real_coords(z, lambda);
    let coords = [x[0], x[1], y[0], y[1]];
    let rounded = coords.map(f64::round);
    let scale = 1.0 + coords.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    if coords
        .iter()
        .zip(rounded.iter())
        .any(|(c, r)| (c - r).abs() > 1e-9 * scale)
    {
        return Err(ThetaError::NotLatticeVector { coords });
    }
    let r = rounded.map(|t| t as i64);
    Ok(([r[0], r[1]], [r[2], r[3]]))
}

/// All sixteen characteristics with entries in `{0, 1/2}`, ordered by the
/// bit pattern of `2 (c1, c2)`.
pub fn two_torsion_points() -> Vec<RealCharacteristic> {
    (0u8..16)
        .map(|bits| {
            let h = |k: u8| if bits >> (3 - k) & 1 == 1 { 0.5 } else { 0.0 };
            RealCharacteristic::new([h(0), h(1)], [h(2), h(3)])
        })
        .collect()
}

/// `e_*(c1, c2) = exp(4 pi i c1.c2)`, computed exactly.
pub fn parity(ch: &RealCharacteristic) -> Result<i8> {
    let b = ch.doubled_bits().ok_or(ThetaError::NotHalfInteger)?;
    let dot = b[0] * b[2] + b[1] * b[3];
    Ok(if dot % 2 == 0 { 1 } else { -1 })
}

/// An element `Z (0, a/3) + (0, b)` of `K(L)`, labelled by `(a, b)` in `(Z/3)^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct KernelElement {
    pub a: u8,
    pub b: u8,
}

impl KernelElement {
    pub const IDENTITY: KernelElement = KernelElement { a: 0, b: 0 };

    pub fn new(a: u8, b: u8) -> Self {
        Self { a: a % 3, b: b % 3 }
    }

    /// The nine elements, identity first.
    pub fn all() -> Vec<KernelElement> {
        (0..3)
            .flat_map(|a| (0..3).map(move |b| KernelElement { a, b }))
            .collect()
    }

    pub fn add(self, other: KernelElement) -> KernelElement {
        KernelElement::new(self.a + other.a, self.b + other.b)
    }

    pub fn neg(self) -> KernelElement {
        KernelElement::new(3 - self.a, 3 - self.b)
    }

    /// Reduced representative; `(0, b)` has real coordinate `y2 = b/3`.
    pub fn point(&self, z: &SiegelMatrix) -> TorusPoint {
        TorusPoint::from_real(
            z,
            RVec2::new(0.0, self.a as f64 / 3.0),
            RVec2::new(0.0, self.b as f64 / 3.0),
        )
    }
}

/// The nine points of `K(L)`, in the order of [`KernelElement::all`].
pub fn polarization_kernel(z: &SiegelMatrix) -> Vec<TorusPoint> {
    KernelElement::all().iter().map(|k| k.point(z)).collect()
}

/// `omega = Z (0, 1/3)`, the generator of `K(L)_1`.
pub fn omega(z: &SiegelMatrix) -> CVec2 {
    from_real_coords(z, &RVec2::new(0.0, 1.0 / 3.0), &RVec2::zeros())
}

/// A point with real coordinates drawn uniformly from `[0,1)^4`.
pub fn random_cell_point<R: Rng + ?Sized>(z: &SiegelMatrix, rng: &mut R) -> TorusPoint {
    let x = RVec2::new(rng.random::<f64>(), rng.random::<f64>());
    let y = RVec2::new(rng.random::<f64>(), rng.random::<f64>());
    TorusPoint::from_real(z, x, y)
}
