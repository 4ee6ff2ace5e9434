//! Zeros of `theta_A` restricted to complex lines, found with the argument
//! principle and polished by Newton's method, and random samples of `C_A`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::divisor::ThetaDivisor;
use crate::error::{Result, ThetaError};
use crate::torus::{random_cell_point, reduce_mod_lattice, CVec2, SiegelMatrix, TorusPoint};

/// Newton roots must reach `|theta_A| < ROOT_RESIDUAL * scale`.
pub const ROOT_RESIDUAL: f64 = 1e-10;
/// Sampled curve points must satisfy `|theta_A| < SAMPLE_RESIDUAL * scale`.
pub const SAMPLE_RESIDUAL: f64 = 1e-8;
/// Genericity threshold for the smallest gradient, relative to the scale.
pub const SMOOTHNESS_THRESHOLD: f64 = 1e-6;

const COUNT_TOLERANCE: f64 = 0.1;
const EDGE_TOLERANCE: f64 = 1e-6;
const MAX_EDGE_DEPTH: u32 = 24;
const MAX_SUBDIVISION_DEPTH: u32 = 12;
const MAX_ISOLATION_DEPTH: u32 = 40;
const JITTER_RETRIES: usize = 5;
const JITTER_SEED: u64 = 0x5eed_7177;
const NEWTON_STEP: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 60;
const LINE_BATCH: usize = 16;
const SPLIT_FRACTIONS: [f64; 5] = [0.5, 0.43, 0.57, 0.37, 0.63];

/// Axis-aligned rectangle `[re, re + width] x [im, im + height]` in the line
/// parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub corner: Complex64,
    pub width: f64,
    pub height: f64,
}

impl Window {
    pub fn new(corner: Complex64, width: f64, height: f64) -> Result<Self> {
        if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
            return Err(ThetaError::InvalidInput(format!("window {width} x {height} has no area")));
        }
        Ok(Self { corner, width, height })
    }

    fn corners(&self) -> [Complex64; 4] {
        let c = self.corner;
        [
            c,
            c + self.width,
            c + Complex64::new(self.width, self.height),
            c + Complex64::new(0.0, self.height),
        ]
    }

    pub fn contains(&self, t: Complex64, slack: f64) -> bool {
        let d = t - self.corner;
        d.re >= -slack && d.re <= self.width + slack && d.im >= -slack && d.im <= self.height + slack
    }

    pub fn centre(&self) -> Complex64 {
        self.corner + Complex64::new(self.width / 2.0, self.height / 2.0)
    }

    /// Cuts the longer side at `fraction` of its length.
    fn split(&self, fraction: f64) -> [Window; 2] {
        if self.width >= self.height {
            let w = self.width * fraction;
            [
                Window { width: w, ..*self },
                Window {
                    corner: self.corner + w,
                    width: self.width - w,
                    height: self.height,
                },
            ]
        } else {
            let h = self.height * fraction;
            [
                Window { height: h, ..*self },
                Window {
                    corner: self.corner + Complex64::new(0.0, h),
                    width: self.width,
                    height: self.height - h,
                },
            ]
        }
    }

    fn quarters(&self) -> [Window; 4] {
        let (w, h) = (self.width / 2.0, self.height / 2.0);
        [(0.0, 0.0), (w, 0.0), (0.0, h), (w, h)].map(|(a, b)| Window {
            corner: self.corner + Complex64::new(a, b),
            width: w,
            height: h,
        })
    }

    fn translated(&self, d: Complex64) -> Window {
        Window {
            corner: self.corner + d,
            ..*self
        }
    }
}

/// The line `t -> base + t * direction` with a search window in `t`.
#[derive(Clone, Copy, Debug)]
pub struct ComplexLine {
    pub base: TorusPoint,
    pub direction: CVec2,
    pub window: Window,
}

impl ComplexLine {
    /// Normalises `direction` to unit length.
    pub fn new(base: TorusPoint, direction: CVec2, window: Window) -> Result<Self> {
        let n = direction.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(ThetaError::InvalidInput("line direction must be nonzero".into()));
        }
        Ok(Self {
            base,
            direction: direction.unscale(n),
            window,
        })
    }

    pub fn at(&self, t: Complex64) -> CVec2 {
        self.base.v + self.direction * t
    }
}

fn gauss_legendre_16() -> &'static ([f64; 16], [f64; 16]) {
    static RULE: OnceLock<([f64; 16], [f64; 16])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = 16;
        let mut nodes = [0.0; 16];
        let mut weights = [0.0; 16];
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

/// `theta_A` restricted to a line, with its `t`-derivative.
struct LineFunction<'a> {
    divisor: &'a ThetaDivisor,
    line: &'a ComplexLine,
}

impl LineFunction<'_> {
    fn eval(&self, t: Complex64) -> Result<(Complex64, Complex64)> {
        let (v, g) = self.divisor.value_with_gradient(&self.line.at(t))?;
        let d = self.line.direction;
        Ok((v.value, g[0].value * d[0] + g[1].value * d[1]))
    }

    /// `int u^k F'/F dt` for `k < MOMENTS` along the segment `a -> b`.
    fn segment(&self, a: Complex64, b: Complex64, frame: &Frame) -> Result<Moments> {
        let (nodes, weights) = gauss_legendre_16();
        let half = (b - a) * 0.5;
        let mid = (a + b) * 0.5;
        let mut acc = [Complex64::new(0.0, 0.0); MOMENTS];
        for (x, w) in nodes.iter().zip(weights) {
            let t = mid + half * *x;
            let (f, df) = self.eval(t)?;
            if !(f.norm() > 0.0) || !df.is_finite() {
                return Err(ThetaError::BoundaryZero);
            }
            let u = frame.scaled(t);
            let mut q = df / f * half * *w;
            for m in acc.iter_mut() {
                *m += q;
                q *= u;
            }
        }
        Ok(acc)
    }

    fn edge(&self, a: Complex64, b: Complex64, whole: Moments, frame: &Frame, depth: u32) -> Result<Moments> {
        let m = (a + b) * 0.5;
        let left = self.segment(a, m, frame)?;
        let right = self.segment(m, b, frame)?;
        let halves = add_moments(&left, &right);
        if (halves[0] - whole[0]).norm() < EDGE_TOLERANCE {
            return Ok(halves);
        }
        if depth >= MAX_EDGE_DEPTH {
            return Err(ThetaError::BoundaryZero);
        }
        let l = self.edge(a, m, left, frame, depth + 1)?;
        let r = self.edge(m, b, right, frame, depth + 1)?;
        Ok(add_moments(&l, &r))
    }

    /// `(1/2 pi i) closed-integral u^k F'/F dt` over the boundary, i.e. the
    /// power sums of the enclosed zeros in the frame variable.
    fn contour(&self, w: &Window, frame: &Frame) -> Result<Moments> {
        let c = w.corners();
        let mut total = [Complex64::new(0.0, 0.0); MOMENTS];
        for k in 0..4 {
            let (a, b) = (c[k], c[(k + 1) % 4]);
            let whole = self.segment(a, b, frame)?;
            total = add_moments(&total, &self.edge(a, b, whole, frame, 0)?);
        }
        let scale = Complex64::new(0.0, 2.0 * PI).inv();
        Ok(total.map(|m| m * scale))
    }

    /// Zero count inside `w` without jitter, subdividing into quarters when
    /// the integral is not close to an integer.
    fn count(&self, w: &Window, depth: u32) -> Result<usize> {
        Ok(self.count_with_moments(w, &Frame::of(w), depth)?.0)
    }

    fn count_with_moments(&self, w: &Window, frame: &Frame, depth: u32) -> Result<(usize, Moments)> {
        let moments = self.contour(w, frame)?;
        let raw = moments[0];
        let n = raw.re.round();
        if n >= 0.0 && (raw - n).norm() < COUNT_TOLERANCE {
            return Ok((n as usize, moments));
        }
        if depth >= MAX_SUBDIVISION_DEPTH {
            return Err(ThetaError::QuadratureStall { depth });
        }
        let mut total = 0;
        let mut sum = [Complex64::new(0.0, 0.0); MOMENTS];
        for q in w.quarters() {
            let (n, m) = self.count_with_moments(&q, frame, depth + 1)?;
            total += n;
            sum = add_moments(&sum, &m);
        }
        Ok((total, sum))
    }

    /// Polishes the roots of the polynomial whose power sums are `moments`;
    /// succeeds only if this yields `n` distinct certified roots.
    fn polish_all(&self, w: &Window, frame: &Frame, n: usize, moments: &Moments) -> Option<Vec<Complex64>> {
        let estimates = roots_from_power_sums(n, moments)?;
        let mut roots: Vec<Complex64> = Vec::with_capacity(n);
        let tol = 1e-8 * frame.radius;
        for u in estimates {
            let t = self.newton(w, frame.centre + u * frame.radius).ok()?;
            if roots.iter().any(|r| (r - t).norm() < tol) {
                return None;
            }
            roots.push(t);
        }
        Some(roots)
    }

    fn newton(&self, w: &Window, start: Complex64) -> Result<Complex64> {
        let divergence = || ThetaError::NewtonDivergence {
            corner: format!("{}", w.corner),
            width: w.width,
            height: w.height,
        };
        let mut t = if w.contains(start, 0.0) { start } else { w.centre() };
        for _ in 0..NEWTON_MAX_ITER {
            let (f, df) = self.eval(t)?;
            if f.norm() == 0.0 {
                break;
            }
            if !(df.norm() > 0.0) {
                return Err(divergence());
            }
            let step = f / df;
            t -= step;
            if !t.is_finite() {
                return Err(divergence());
            }
            if step.norm() < NEWTON_STEP {
                let slack = 1e-9 * w.width.max(w.height);
                if !w.contains(t, slack) {
                    return Err(divergence());
                }
                let p = reduce_mod_lattice(&self.divisor.z, &self.line.at(t));
                if self.divisor.value(&p.v)?.abs() >= ROOT_RESIDUAL * self.divisor.scale {
                    return Err(divergence());
                }
                return Ok(t);
            }
        }
        Err(divergence())
    }

    /// Locates the `n` zeros in `w`: directly from the power sums when that
    /// succeeds, otherwise by splitting `w` and recursing.
    fn isolate(&self, w: &Window, frame: &Frame, n: usize, moments: &Moments, depth: u32, out: &mut Vec<Complex64>) -> Result<()> {
        if n == 0 {
            return Ok(());
        }
        if n < MOMENTS {
            if let Some(roots) = self.polish_all(w, frame, n, moments) {
                out.extend(roots);
                return Ok(());
            }
        }
        if n == 1 {
            out.push(self.newton(w, frame.centre + moments[1] * frame.radius)?);
            return Ok(());
        }
        if depth >= MAX_ISOLATION_DEPTH {
            return Err(ThetaError::QuadratureStall { depth });
        }
        let mut last_err = ThetaError::BoundaryZero;
        for f in SPLIT_FRACTIONS {
            let halves = w.split(f);
            let frames = halves.map(|h| Frame::of(&h));
            let counted: Result<Vec<(usize, Moments)>> = halves
                .iter()
                .zip(&frames)
                .map(|(h, fr)| self.count_with_moments(h, fr, 0))
                .collect();
            match counted {
                Ok(c) if c[0].0 + c[1].0 == n => {
                    for ((h, fr), (k, m)) in halves.iter().zip(&frames).zip(c) {
                        self.isolate(h, fr, k, &m, depth + 1, out)?;
                    }
                    return Ok(());
                }
                Ok(_) => last_err = ThetaError::QuadratureStall { depth },
                Err(e) => last_err = e,
            }
        }
        Err(last_err)
    }
}

/// Number of power sums carried through the contour integrals; windows
/// with fewer zeros than this are solved directly.
const MOMENTS: usize = 9;
type Moments = [Complex64; MOMENTS];

fn add_moments(a: &Moments, b: &Moments) -> Moments {
    std::array::from_fn(|k| a[k] + b[k])
}

/// Local variable `u = (t - centre) / radius` keeping power sums of order one.
#[derive(Clone, Copy, Debug)]
struct Frame {
    centre: Complex64,
    radius: f64,
}

impl Frame {
    fn of(w: &Window) -> Self {
        Self {
            centre: w.centre(),
            radius: 0.5 * w.width.hypot(w.height),
        }
    }

    fn scaled(&self, t: Complex64) -> Complex64 {
        (t - self.centre) / self.radius
    }
}

/// Roots of the monic polynomial whose first `n` power sums are
/// `moments[1..=n]`, via Newton's identities and the companion matrix.
fn roots_from_power_sums(n: usize, moments: &Moments) -> Option<Vec<Complex64>> {
    if n == 1 {
        return Some(vec![moments[1]]);
    }
    // e[k]: elementary symmetric polynomials of the roots
    let mut e = vec![Complex64::new(1.0, 0.0); n + 1];
    for k in 1..=n {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += e[k - i] * moments[i] * sign;
        }
        e[k] = acc / k as f64;
    }
    // u^n + c[n-1] u^{n-1} + ... + c[0], with c[n-k] = (-1)^k e[k]
    let companion = DMatrix::from_fn(n, n, |i, j| {
        if j == n - 1 {
            let k = n - i;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            e[k] * sign
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let roots = companion.schur().eigenvalues()?;
    roots.iter().all(|r| r.is_finite()).then(|| roots.iter().copied().collect())
}

/// Runs `f` on the window, jittering its corner by `[1e-4, 3e-4]` in both
/// axes when a zero sits on the contour.
fn with_jitter<T>(window: &Window, mut f: impl FnMut(&Window) -> Result<T>) -> Result<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(JITTER_SEED);
    let mut w = *window;
    for attempt in 0..=JITTER_RETRIES {
        match f(&w) {
            Err(ThetaError::BoundaryZero) if attempt < JITTER_RETRIES => {
                let d = Complex64::new(rng.random_range(1e-4..3e-4), rng.random_range(1e-4..3e-4));
                w = window.translated(d * (attempt + 1) as f64);
            }
            other => return other,
        }
    }
    Err(ThetaError::BoundaryZero)
}

/// Number of zeros of `t -> theta_A(base + t dir)` inside the line's window.
pub fn count_zeros_on_rectangle(line: &ComplexLine, z: &SiegelMatrix, eps: f64) -> Result<usize> {
    let divisor = ThetaDivisor::new(*z, eps)?;
    count_zeros_with(&divisor, line)
}

/// The divisor evaluated tightly enough that a residual below
/// `ROOT_RESIDUAL * scale` is not truncation noise. Looser tolerances make the
/// series jump where the truncation radius changes, which the contour
/// integrator reads as spurious zeros.
fn certifying(divisor: &ThetaDivisor) -> ThetaDivisor {
    ThetaDivisor {
        eps: divisor.eps.min(0.1 * ROOT_RESIDUAL * divisor.scale),
        ..*divisor
    }
}

pub fn count_zeros_with(divisor: &ThetaDivisor, line: &ComplexLine) -> Result<usize> {
    let divisor = &certifying(divisor);
    let lf = LineFunction { divisor, line };
    with_jitter(&line.window, |w| lf.count(w, 0))
}

/// Zero count of an explicit sub-window of the line, without jitter.
pub fn count_zeros_in(divisor: &ThetaDivisor, line: &ComplexLine, window: &Window) -> Result<usize> {
    let divisor = &certifying(divisor);
    LineFunction { divisor, line }.count(window, 0)
}

/// Roots `t` in the window, sorted by real then imaginary part.
pub fn locate_zeros_on_line(line: &ComplexLine, z: &SiegelMatrix, eps: f64) -> Result<Vec<Complex64>> {
    let divisor = ThetaDivisor::new(*z, eps)?;
    locate_zeros_with(&divisor, line)
}

pub fn locate_zeros_with(divisor: &ThetaDivisor, line: &ComplexLine) -> Result<Vec<Complex64>> {
    let divisor = &certifying(divisor);
    let lf = LineFunction { divisor, line };
    let mut roots = with_jitter(&line.window, |w| {
        let frame = Frame::of(w);
        let (n, moments) = lf.count_with_moments(w, &frame, 0)?;
        let mut out = Vec::with_capacity(n);
        lf.isolate(w, &frame, n, &moments, 0, &mut out)?;
        Ok(out)
    })?;
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// Points of `C_A` reduced into the fundamental cell.
#[derive(Clone, Debug, Serialize)]
pub struct CurveSample {
    #[serde(serialize_with = "crate::report::ser_points")]
    pub points: Vec<TorusPoint>,
    /// `|theta_A|` at each point.
    pub residuals: Vec<f64>,
    /// Euclidean norm of the gradient of `theta_A` at each point.
    pub gradient_norms: Vec<f64>,
    pub scale: f64,
    pub lines_used: usize,
    /// Lines abandoned because a root could not be certified.
    pub lines_failed: usize,
}

impl CurveSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_relative_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0f64, |m, r| m.max(*r)) / self.scale
    }
}

fn random_line<R: Rng>(z: &SiegelMatrix, rng: &mut R) -> ComplexLine {
    let base = random_cell_point(z, rng);
    let mut d = [0.0f64; 4];
    loop {
        for c in d.iter_mut() {
            *c = rng.random_range(-1.0..1.0);
        }
        if d.iter().map(|c| c * c).sum::<f64>() > 1e-2 {
            break;
        }
    }
    let direction = CVec2::new(Complex64::new(d[0], d[1]), Complex64::new(d[2], d[3]));
    let window = Window {
        corner: Complex64::new(-1.0, -1.0),
        width: 2.0,
        height: 2.0,
    };
    ComplexLine::new(base, direction, window).expect("direction is nonzero")
}

/// Draws `n` points of `C_A` by intersecting it with random lines through the
/// fundamental cell. Lines are processed in parallel batches and merged in
/// line order, so the sample depends only on `seed`.
pub fn sample_curve_points(z: &SiegelMatrix, n: usize, seed: u64) -> Result<CurveSample> {
    let divisor = ThetaDivisor::new(*z, crate::theta::DEFAULT_EPS)?;
    sample_curve_points_with(&divisor, n, seed)
}

pub fn sample_curve_points_with(divisor: &ThetaDivisor, n: usize, seed: u64) -> Result<CurveSample> {
    if n == 0 {
        return Err(ThetaError::InvalidInput("sample size must be at least 1".into()));
    }
    let divisor = &certifying(divisor);
    let z = divisor.z;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_lines = 50 * n;
    let mut sample = CurveSample {
        points: Vec::with_capacity(n),
        residuals: Vec::with_capacity(n),
        gradient_norms: Vec::with_capacity(n),
        scale: divisor.scale,
        lines_used: 0,
        lines_failed: 0,
    };
    while sample.points.len() < n && sample.lines_used < max_lines {
        let batch = LINE_BATCH.min(max_lines - sample.lines_used);
        let lines: Vec<ComplexLine> = (0..batch).map(|_| random_line(&z, &mut rng)).collect();
        let found: Vec<Result<Vec<(TorusPoint, f64, f64)>>> = lines
            .par_iter()
            .map(|line| {
                locate_zeros_with(divisor, line)?
                    .into_iter()
                    .map(|t| {
                        let p = reduce_mod_lattice(&z, &line.at(t));
                        let (v, g) = divisor.value_with_gradient(&p.v)?;
                        Ok((p, v.abs(), g[0].value.norm().hypot(g[1].value.norm())))
                    })
                    .collect()
            })
            .collect();
        for roots in found {
            sample.lines_used += 1;
            let Ok(roots) = roots else {
                sample.lines_failed += 1;
                continue;
            };
            for (p, r, g) in roots {
                if sample.points.len() < n && r < SAMPLE_RESIDUAL * divisor.scale {
                    sample.points.push(p);
                    sample.residuals.push(r);
                    sample.gradient_norms.push(g);
                }
            }
            if sample.points.len() >= n {
                break;
            }
        }
    }
    if sample.points.len() < n {
        return Err(ThetaError::SamplingExhausted {
            found: sample.points.len(),
            requested: n,
            lines: sample.lines_used,
        });
    }
    Ok(sample)
}

#[derive(Clone, Debug, Serialize)]
pub struct SmoothnessReport {
    pub n: usize,
    pub seed: u64,
    pub scale: f64,
    pub min_gradient: f64,
    pub mean_gradient: f64,
    pub max_gradient: f64,
    pub min_gradient_relative: f64,
    pub threshold: f64,
    /// `min_gradient > threshold * scale`; a genericity indicator only.
    pub generic: bool,
}

pub fn smoothness_report(z: &SiegelMatrix, n: usize, seed: u64) -> Result<SmoothnessReport> {
    let divisor = ThetaDivisor::new(*z, crate::theta::DEFAULT_EPS)?;
    smoothness_from_sample(&sample_curve_points_with(&divisor, n, seed)?, seed)
}

pub fn smoothness_from_sample(sample: &CurveSample, seed: u64) -> Result<SmoothnessReport> {
    let g = &sample.gradient_norms;
    let min = g.iter().copied().fold(f64::INFINITY, f64::min);
    let max = g.iter().copied().fold(0.0, f64::max);
    let mean = g.iter().sum::<f64>() / g.len() as f64;
    Ok(SmoothnessReport {
        n: g.len(),
        seed,
        scale: sample.scale,
        min_gradient: min,
        mean_gradient: mean,
        max_gradient: max,
        min_gradient_relative: min / sample.scale,
        threshold: SMOOTHNESS_THRESHOLD,
        generic: min > SMOOTHNESS_THRESHOLD * sample.scale,
    })
}

/// Zeros of `theta_A` for `Z = diag(tau1, tau2)` on one line in each
/// coordinate direction, over one period cell of that coordinate.
#[derive(Clone, Debug, Serialize)]
pub struct ProductLineReport {
    pub v1_count: usize,
    pub v2_count: usize,
    #[serde(serialize_with = "crate::report::ser_complex_vec")]
    pub v1_roots: Vec<Complex64>,
    #[serde(serialize_with = "crate::report::ser_complex_vec")]
    pub v2_roots: Vec<Complex64>,
    /// Largest distance, modulo the period lattice, from an expected root
    /// (`(1 + tau1)/2` on the `v1`-line, `0, 3/2, tau2/2` on the `v2`-line)
    /// to the nearest located root.
    pub root_error: f64,
}

/// Distance from `t` to `target` modulo `p Z + tau Z` with real `p`.
fn periodic_distance(t: Complex64, target: Complex64, p: f64, tau: Complex64) -> f64 {
    let d = t - target;
    let u = (d.im / tau.im).round();
    let s = ((d.re - u * tau.re) / p).round();
    (d - tau * u - s * p).norm()
}

pub fn product_line_zeros(tau1: Complex64, tau2: Complex64, eps: f64) -> Result<ProductLineReport> {
    let z = SiegelMatrix::diagonal(tau1, tau2)?;
    let divisor = ThetaDivisor::new(z, eps)?;
    let e1 = CVec2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    let e2 = CVec2::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let v1_generic = 0.23 + tau1 * 0.41;
    let v2_generic = 0.7 + tau2 * 0.29;
    let corner = Complex64::new(-0.2, -0.2);

    let v1_line = ComplexLine::new(
        TorusPoint::from_complex(&z, CVec2::new(Complex64::new(0.0, 0.0), v2_generic)),
        e1,
        Window::new(corner, 1.0, tau1.im)?,
    )?;
    let v2_line = ComplexLine::new(
        TorusPoint::from_complex(&z, CVec2::new(v1_generic, Complex64::new(0.0, 0.0))),
        e2,
        Window::new(corner, 3.0, tau2.im)?,
    )?;
    let v1_count = count_zeros_with(&divisor, &v1_line)?;
    let v2_count = count_zeros_with(&divisor, &v2_line)?;
    let v1_roots = locate_zeros_with(&divisor, &v1_line)?;
    let v2_roots = locate_zeros_with(&divisor, &v2_line)?;

    let nearest = |roots: &[Complex64], e: Complex64, p: f64, tau: Complex64| {
        roots
            .iter()
            .map(|&t| periodic_distance(t, e, p, tau))
            .fold(f64::INFINITY, f64::min)
    };
    let mut root_error = nearest(&v1_roots, (1.0 + tau1) * 0.5, 1.0, tau1);
    for e in [Complex64::new(0.0, 0.0), Complex64::new(1.5, 0.0), tau2 * 0.5] {
        root_error = root_error.max(nearest(&v2_roots, e, 3.0, tau2));
    }
    Ok(ProductLineReport {
        v1_count,
        v2_count,
        v1_roots,
        v2_roots,
        root_error,
    })
}
