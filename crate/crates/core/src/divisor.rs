//! The odd section `theta_A = theta[-omega; 0] - theta[omega; 0]` of the
//! characteristic-zero polarising bundle and the curve `C_A = (theta_A = 0)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Result, ThetaError};
use crate::theta::{
    canonical_theta_shifted, classical_theta, classical_theta_with_gradient, inverse_formula_factor,
    ComplexCharacteristic, KernelShift, ThetaValue,
};
use crate::torus::{
    omega, reduce_mod_lattice, riemann_form, to_real_coords, two_torsion_points, CVec2, KernelElement,
    PolarizationType, RVec2, RealCharacteristic, SiegelMatrix, TorusPoint,
};

pub const OMEGA_CHAR: RealCharacteristic = RealCharacteristic {
    c1: [0.0, 1.0 / 3.0],
    c2: [0.0, 0.0],
};
pub const MINUS_OMEGA_CHAR: RealCharacteristic = RealCharacteristic {
    c1: [0.0, -1.0 / 3.0],
    c2: [0.0, 0.0],
};

/// Relative threshold below which a census value counts as a zero.
pub const ON_DIVISOR_THRESHOLD: f64 = 1e-6;
/// Minimum `min|off| / max|on|` for the census to be trusted.
pub const MIN_SEPARATION: f64 = 1e3;
/// Relative value a translate must reach at a witness point.
pub const WITNESS_THRESHOLD: f64 = 1e-4;

const SCALE_GRID: usize = 8;

/// `theta_A(v)`; the tail bound is the sum of both constituents' bounds.
pub fn theta_a(z: &SiegelMatrix, v: &CVec2, eps: f64) -> Result<ThetaValue> {
    let minus = classical_theta(z, &MINUS_OMEGA_CHAR, v, eps)?;
    let plus = classical_theta(z, &OMEGA_CHAR, v, eps)?;
    Ok(minus.minus(&plus))
}

pub fn theta_a_with_gradient(z: &SiegelMatrix, v: &CVec2, eps: f64) -> Result<(ThetaValue, [ThetaValue; 2])> {
    let (vm, gm) = classical_theta_with_gradient(z, &MINUS_OMEGA_CHAR, v, eps)?;
    let (vp, gp) = classical_theta_with_gradient(z, &OMEGA_CHAR, v, eps)?;
    Ok((vm.minus(&vp), [gm[0].minus(&gp[0]), gm[1].minus(&gp[1])]))
}

/// `theta^0_{-omega} - theta^0_omega`, the same section written with
/// canonical theta functions.
pub fn theta_a_canonical(z: &SiegelMatrix, v: &CVec2, eps: f64) -> Result<ThetaValue> {
    let (minus, plus) = theta_a_canonical_parts(z, v, eps)?;
    Ok(minus.minus(&plus))
}

/// The two canonical constituents `(theta^0_{-omega}(v), theta^0_omega(v))`.
pub fn theta_a_canonical_parts(z: &SiegelMatrix, v: &CVec2, eps: f64) -> Result<(ThetaValue, ThetaValue)> {
    let c = ComplexCharacteristic::zero();
    Ok((
        canonical_theta_shifted(z, &c, KernelShift::MINUS_OMEGA, v, eps)?,
        canonical_theta_shifted(z, &c, KernelShift::OMEGA, v, eps)?,
    ))
}

/// Constituents `(theta^c_omega(v), exp(4 pi i Im H(omega, c2)) theta^c_{-omega}(v))`
/// of [`theta_al`].
pub fn theta_al_parts(
    z: &SiegelMatrix,
    c: &ComplexCharacteristic,
    v: &CVec2,
    eps: f64,
) -> Result<(ThetaValue, ThetaValue)> {
    let first = canonical_theta_shifted(z, c, KernelShift::OMEGA, v, eps)?;
    let phase = (Complex64::i() * (4.0 * PI * riemann_form(z, &omega(z), &c.c2_complex()).im)).exp();
    let second = canonical_theta_shifted(z, c, KernelShift::MINUS_OMEGA, v, eps)?;
    let second = ThetaValue {
        value: second.value * phase,
        ..second
    };
    Ok((first, second))
}

/// `theta_{A,L} = theta^c_omega - exp(4 pi i Im H(omega, c2)) theta^c_{-omega}`
/// for a symmetric characteristic `c`.
pub fn theta_al(z: &SiegelMatrix, c: &ComplexCharacteristic, v: &CVec2, eps: f64) -> Result<ThetaValue> {
    let (a, b) = theta_al_parts(z, c, v, eps)?;
    Ok(a.minus(&b))
}

/// Sign of `theta_{A,L}` under `v -> -v`: odd for even `c`, even for odd `c`.
pub fn theta_al_sign(c: &RealCharacteristic) -> Result<i8> {
    Ok(-crate::torus::parity(c)?)
}

/// `theta_A` on a fixed `Z`, with its magnitude reference.
///
/// The scale is `max |theta_A|` over an `8 x 8` grid of cell points with
/// `x = (i/8, j/8)` and `y = (j/8, i/8)`.
#[derive(Clone, Copy, Debug)]
pub struct ThetaDivisor {
    pub z: SiegelMatrix,
    pub eps: f64,
    pub scale: f64,
}

impl ThetaDivisor {
    pub fn new(z: SiegelMatrix, eps: f64) -> Result<Self> {
        let mut scale: f64 = 0.0;
        let n = SCALE_GRID as f64;
        for i in 0..SCALE_GRID {
            for j in 0..SCALE_GRID {
                let p = TorusPoint::from_real(
                    &z,
                    RVec2::new(i as f64 / n, j as f64 / n),
                    RVec2::new(j as f64 / n, i as f64 / n),
                );
                scale = scale.max(theta_a(&z, &p.v, eps)?.abs());
            }
        }
        Ok(Self { z, eps, scale })
    }

    pub fn value(&self, v: &CVec2) -> Result<ThetaValue> {
        theta_a(&self.z, v, self.eps)
    }

    pub fn value_with_gradient(&self, v: &CVec2) -> Result<(ThetaValue, [ThetaValue; 2])> {
        theta_a_with_gradient(&self.z, v, self.eps)
    }

    /// `|theta_A|` at the cell representative of `v`, relative to the scale.
    pub fn relative_magnitude(&self, v: &CVec2) -> Result<f64> {
        let p = reduce_mod_lattice(&self.z, v);
        Ok(self.value(&p.v)?.abs() / self.scale)
    }
}

pub fn divisor_scale(z: &SiegelMatrix, eps: f64) -> Result<f64> {
    Ok(ThetaDivisor::new(*z, eps)?.scale)
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusResult {
    pub on_points: Vec<RealCharacteristic>,
    pub off_points: Vec<RealCharacteristic>,
    /// One value per characteristic of [`two_torsion_points`], in that order.
    pub values: Vec<ThetaValue>,
    #[serde(serialize_with = "crate::report::ser_f64_inf")]
    pub separation_ratio: f64,
    pub scale: f64,
}

impl CensusResult {
    pub fn on_count(&self) -> usize {
        self.on_points.len()
    }
}

/// Evaluates `theta_A` at the sixteen 2-torsion points and splits them into
/// points on and off `C_A`.
pub fn two_torsion_census(z: &SiegelMatrix, eps: f64) -> Result<CensusResult> {
    let divisor = ThetaDivisor::new(*z, eps)?;
    census_with(&divisor)
}

pub fn census_with(divisor: &ThetaDivisor) -> Result<CensusResult> {
    let threshold = ON_DIVISOR_THRESHOLD * divisor.scale;
    let mut on_points = Vec::new();
    let mut off_points = Vec::new();
    let mut values = Vec::with_capacity(16);
    let mut max_on: f64 = 0.0;
    let mut all_on_below_tail = true;
    let mut min_off = f64::INFINITY;
    for ch in two_torsion_points() {
        let t = divisor.value(&ch.point(&divisor.z))?;
        if t.abs() < threshold {
            on_points.push(ch);
            max_on = max_on.max(t.abs());
            all_on_below_tail &= t.abs() <= t.tail_bound;
        } else {
            off_points.push(ch);
            min_off = min_off.min(t.abs());
        }
        values.push(t);
    }
    let separation_ratio = if all_on_below_tail || max_on == 0.0 {
        f64::INFINITY
    } else {
        min_off / max_on
    };
    let result = CensusResult {
        on_points,
        off_points,
        values,
        separation_ratio,
        scale: divisor.scale,
    };
    if separation_ratio < MIN_SEPARATION {
        return Err(ThetaError::SeparationFailure(Box::new(result)));
    }
    Ok(result)
}

/// Genus of the quotient `C' = C_A / (-1)` forced by Riemann-Hurwitz
/// `2g - 2 = 2(2g' - 2) + b`, when it is a non-negative integer.
pub fn hurwitz_quotient_genus(g: u32, branch_points: u32) -> Option<u32> {
    let lhs = 2 * g as i64 - 2 - branch_points as i64;
    if lhs % 2 != 0 {
        return None;
    }
    let twice = lhs / 2 + 2;
    (twice >= 0 && twice % 2 == 0).then_some((twice / 2) as u32)
}

pub fn genus_of_polarization(d1: u32, d2: u32) -> Result<u32> {
    Ok(PolarizationType::new(d1, d2)?.genus())
}

/// A translate `C_A + shift` of the theta divisor by an element of `K(L)`.
#[derive(Clone, Copy, Debug)]
pub struct DivisorHandle {
    pub divisor: ThetaDivisor,
    pub shift: KernelElement,
    pub shift_point: TorusPoint,
}

impl DivisorHandle {
    /// `theta_A(v - shift)`.
    pub fn eval(&self, v: &CVec2) -> Result<ThetaValue> {
        self.divisor.value(&(v - self.shift_point.v))
    }

    /// `|theta_A|` at the cell representative of `v - shift`, relative to the
    /// divisor scale. Vanishes exactly on the translated curve.
    pub fn relative_magnitude(&self, v: &CVec2) -> Result<f64> {
        self.divisor.relative_magnitude(&(v - self.shift_point.v))
    }
}

/// The nine translates of `C_A` by `K(L)`; index 0 is `C_A` itself.
pub fn kernel_translates(z: &SiegelMatrix, eps: f64) -> Result<Vec<DivisorHandle>> {
    let divisor = ThetaDivisor::new(*z, eps)?;
    Ok(translates_of(&divisor))
}

pub fn translates_of(divisor: &ThetaDivisor) -> Vec<DivisorHandle> {
    KernelElement::all()
        .into_iter()
        .map(|k| DivisorHandle {
            divisor: *divisor,
            shift: k,
            shift_point: k.point(&divisor.z),
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct PairWitness {
    pub i: usize,
    pub j: usize,
    /// Index into the zero sample of the best witness, if one clears the threshold.
    pub witness: Option<usize>,
    /// Largest `|divisor_j| / scale` over translated zeros of divisor `i`.
    pub best_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub pairs: Vec<PairWitness>,
    pub all_distinct: bool,
    pub zeros_used: usize,
}

/// Certifies pairwise distinctness of translates: for every ordered pair
/// `(i, j)` a point of translate `i` (a zero of `theta_A` moved by `shift_i`)
/// where translate `j` is far from zero.
pub fn translate_witnesses(handles: &[DivisorHandle], zeros: &[TorusPoint]) -> Result<WitnessReport> {
    let mut pairs = Vec::new();
    for (i, hi) in handles.iter().enumerate() {
        for (j, hj) in handles.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut best = (None, 0.0f64);
            for (k, p) in zeros.iter().enumerate() {
                let on_i = p.v + hi.shift_point.v;
                let r = hj.relative_magnitude(&on_i)?;
                if r > best.1 {
                    best = (Some(k), r);
                }
            }
            pairs.push(PairWitness {
                i,
                j,
                witness: best.0.filter(|_| best.1 > WITNESS_THRESHOLD),
                best_ratio: best.1,
            });
        }
    }
    let all_distinct = pairs.iter().all(|p| p.witness.is_some());
    Ok(WitnessReport {
        pairs,
        all_distinct,
        zeros_used: zeros.len(),
    })
}

/// One-variable factor `f(v1) = sum_l exp(pi i l^2 tau1 + 2 pi i v1 l)`.
pub fn product_factor_e(tau1: Complex64, v1: Complex64) -> Complex64 {
    let n = series_extent(tau1, v1);
    (-n..=n)
        .map(|l| {
            let l = l as f64;
            (Complex64::i() * PI * (tau1 * (l * l) + v1 * (2.0 * l))).exp()
        })
        .sum()
}

/// One-variable factor `g(v2) = sum_l (b^-_l - b^+_l)` with
/// `b^+-_l = exp(pi i (l +- 1/3)^2 tau2 + 2 pi i v2 (l +- 1/3))`.
pub fn product_factor_f(tau2: Complex64, v2: Complex64) -> Complex64 {
    let n = series_extent(tau2, v2);
    let b = |k: f64| (Complex64::i() * PI * (tau2 * (k * k) + v2 * (2.0 * k))).exp();
    (-n..=n)
        .map(|l| {
            let l = l as f64;
            b(l - 1.0 / 3.0) - b(l + 1.0 / 3.0)
        })
        .sum()
}

fn series_extent(tau: Complex64, v: Complex64) -> i64 {
    let centre = v.im.abs() / tau.im;
    (centre + (60.0 / tau.im).sqrt()).ceil() as i64 + 2
}

pub const COMPONENT_THRESHOLD: f64 = 1e-10;
pub const OFF_COMPONENT_THRESHOLD: f64 = 1e-3;
pub const FACTORIZATION_THRESHOLD: f64 = 1e-10;
pub const NODE_GRADIENT_THRESHOLD: f64 = 1e-8;

const PRODUCT_SEED: u64 = 0x9_0d_0c7;
const PRODUCT_SAMPLES: usize = 100;
/// Torus distance (in period coordinates) kept from every component when
/// sampling off-component points.
const OFF_COMPONENT_MARGIN: f64 = 0.25;

#[derive(Clone, Debug, Serialize)]
pub struct ComponentResidual {
    pub name: String,
    /// `max |theta_A| / scale` over the sampled points of the component.
    pub residual: f64,
    /// Largest certified error bound seen, relative to the scale.
    pub error_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductReport {
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub tau1: Complex64,
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub tau2: Complex64,
    pub scale: f64,
    /// The `F` copy `{v1 = (1 + tau1)/2}` then the three `E` copies
    /// `{v2 = 0}`, `{v2 = 3/2}`, `{v2 = tau2/2}`.
    pub components: Vec<ComponentResidual>,
    pub off_component_min: f64,
    pub factorization_residual: f64,
    pub node_gradient: f64,
    pub node_gradient_relative: f64,
    /// Whether each `F ∩ E` intersection is a 2-torsion point of `A`.
    pub intersections_two_torsion: Vec<bool>,
}

impl ProductReport {
    pub fn verify(&self) -> Result<()> {
        let fail = |component: &str, residual: f64, threshold: f64| ThetaError::ComponentResidualTooLarge {
            component: component.to_string(),
            residual,
            threshold,
        };
        for c in &self.components {
            if !(c.residual < COMPONENT_THRESHOLD) {
                return Err(fail(&c.name, c.residual, COMPONENT_THRESHOLD));
            }
        }
        if !(self.off_component_min > OFF_COMPONENT_THRESHOLD) {
            return Err(fail("off-component minimum", self.off_component_min, OFF_COMPONENT_THRESHOLD));
        }
        if !(self.factorization_residual < FACTORIZATION_THRESHOLD) {
            return Err(fail("factorization", self.factorization_residual, FACTORIZATION_THRESHOLD));
        }
        if !(self.node_gradient < NODE_GRADIENT_THRESHOLD) {
            return Err(fail("node gradient", self.node_gradient, NODE_GRADIENT_THRESHOLD));
        }
        if let Some(k) = self.intersections_two_torsion.iter().position(|ok| !ok) {
            return Err(fail(&format!("intersection {k} is not 2-torsion"), 1.0, 0.0));
        }
        Ok(())
    }

    pub fn passes(&self) -> bool {
        self.verify().is_ok()
    }
}

fn torus_distance(s: f64, t: f64, s0: f64, t0: f64) -> f64 {
    let wrap = |d: f64| {
        let d = d.rem_euclid(1.0);
        d.min(1.0 - d)
    };
    wrap(s - s0).hypot(wrap(t - t0))
}

/// Examines `theta_A` for `Z = diag(tau1, tau2)`, where it factors as
/// `f(v1) g(v2)` and `C_A` is one copy of `F` plus three copies of `E`.
pub fn product_components(tau1: Complex64, tau2: Complex64, eps: f64) -> Result<ProductReport> {
    if !(tau1.im > 0.0 && tau2.im > 0.0) {
        return Err(ThetaError::InvalidInput("tau1 and tau2 need positive imaginary part".into()));
    }
    let z = SiegelMatrix::diagonal(tau1, tau2)?;
    let divisor = ThetaDivisor::new(z, eps)?;
    let scale = divisor.scale;
    let mut rng = ChaCha8Rng::seed_from_u64(PRODUCT_SEED);
    let one = Complex64::new(1.0, 0.0);
    let three = Complex64::new(3.0, 0.0);
    let half = |w: Complex64| w * 0.5;

    let mut residual_on = |name: &str, point: &mut dyn FnMut(&mut ChaCha8Rng) -> CVec2| -> Result<ComponentResidual> {
        let mut residual: f64 = 0.0;
        let mut bound: f64 = 0.0;
        for _ in 0..PRODUCT_SAMPLES {
            let t = divisor.value(&point(&mut rng))?;
            residual = residual.max(t.abs() / scale);
            bound = bound.max(t.error_bound() / scale);
        }
        Ok(ComponentResidual {
            name: name.to_string(),
            residual,
            error_bound: bound,
        })
    };
    let v1_node = half(one + tau1);
    let e_values = [Complex64::new(0.0, 0.0), half(three), half(tau2)];
    let mut components = vec![residual_on("F: v1 = (1 + tau1)/2", &mut |r| {
        CVec2::new(v1_node, three * r.random::<f64>() + tau2 * r.random::<f64>())
    })?];
    for (name, v2) in ["E: v2 = 0", "E: v2 = 3/2", "E: v2 = tau2/2"].iter().zip(e_values) {
        components.push(residual_on(name, &mut |r| {
            CVec2::new(one * r.random::<f64>() + tau1 * r.random::<f64>(), v2)
        })?);
    }

    let mut off_component_min = f64::INFINITY;
    let mut taken = 0;
    while taken < PRODUCT_SAMPLES {
        let (s1, t1, s2, t2): (f64, f64, f64, f64) = (rng.random(), rng.random(), rng.random(), rng.random());
        let near_f = torus_distance(s1, t1, 0.5, 0.5) < OFF_COMPONENT_MARGIN;
        let near_e = [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5)]
            .iter()
            .any(|&(a, b)| torus_distance(s2, t2, a, b) < OFF_COMPONENT_MARGIN);
        if near_f || near_e {
            continue;
        }
        let v = CVec2::new(one * s1 + tau1 * t1, three * s2 + tau2 * t2);
        off_component_min = off_component_min.min(divisor.value(&v)?.abs() / scale);
        taken += 1;
    }

    let mut factorization_residual: f64 = 0.0;
    for i in 0..10 {
        for j in 0..10 {
            let v1 = (one + tau1) * ((i as f64 + 0.5) / 10.0);
            let v2 = (three + tau2) * ((j as f64 + 0.5) / 10.0);
            let t = divisor.value(&CVec2::new(v1, v2))?.value;
            let fg = product_factor_e(tau1, v1) * product_factor_f(tau2, v2);
            factorization_residual = factorization_residual.max((t - fg).norm() / scale);
        }
    }

    let node = CVec2::new(v1_node, Complex64::new(0.0, 0.0));
    let (_, grad) = divisor.value_with_gradient(&node)?;
    let node_gradient = grad[0].value.norm().hypot(grad[1].value.norm());

    let intersections_two_torsion = e_values
        .iter()
        .map(|&v2| {
            let (x, y) = to_real_coords(&z, &CVec2::new(v1_node, v2));
            x.iter()
                .chain(y.iter())
                .all(|c| (2.0 * c - (2.0 * c).round()).abs() < 1e-12)
        })
        .collect();

    Ok(ProductReport {
        tau1,
        tau2,
        scale,
        components,
        off_component_min,
        factorization_residual,
        node_gradient,
        node_gradient_relative: node_gradient / scale,
        intersections_two_torsion,
    })
}

/// Inverse-formula scalar of `theta_{A,L}`, exposed for reporting.
pub fn theta_al_phase(z: &SiegelMatrix, c: &ComplexCharacteristic) -> Complex64 {
    inverse_formula_factor(z, c, KernelShift::OMEGA)
}
