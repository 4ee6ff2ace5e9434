//! The verification suite and its JSON report, plus CSV export of curve
//! samples.
//!
//! Reports contain only values computed from `Z`, the seed and the
//! configuration, serialised in a fixed field order, so equal inputs give
//! byte-identical output.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::{SerializeSeq, SerializeTuple};
use serde::{Serialize, Serializer};
use serde_json::{json, Value};
use std::io::Write;
use std::path::Path;

use crate::divisor::{
    census_with, hurwitz_quotient_genus, product_components, translate_witnesses, translates_of, ThetaDivisor,
    COMPONENT_THRESHOLD, FACTORIZATION_THRESHOLD, MIN_SEPARATION, NODE_GRADIENT_THRESHOLD, OFF_COMPONENT_THRESHOLD,
    OMEGA_CHAR,
};
use crate::error::{Result, ThetaError};
use crate::oracle::{direct_theta, fd_gradient, OracleConfig};
use crate::theta::{
    classical_theta, classical_theta_gradient, eigenspace_analysis, inverse_formula_residual, quasiperiodicity_residual,
    ComplexCharacteristic, KernelShift,
};
use crate::torus::{
    lattice_vector, parity, random_cell_point, two_torsion_points, CVec2, RVec2, RealCharacteristic, SiegelMatrix,
    TorusPoint,
};
use crate::zeros::{product_line_zeros, sample_curve_points_with, smoothness_from_sample, SMOOTHNESS_THRESHOLD};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

pub const ODDNESS_RATIO: f64 = 1.0;
pub const INVERSE_FORMULA_THRESHOLD: f64 = 1e-9;
pub const QUASIPERIODICITY_THRESHOLD: f64 = 1e-10;
pub const ORACLE_VALUE_THRESHOLD: f64 = 1e-11;
pub const ORACLE_GRADIENT_THRESHOLD: f64 = 1e-6;
pub const ROOT_MATCH_THRESHOLD: f64 = 1e-9;
/// Gradients smaller than this are too close to cancellation for a relative
/// finite-difference comparison.
pub const ORACLE_GRADIENT_FLOOR: f64 = 1e-3;

pub fn ser_complex<S: Serializer>(c: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&c.re)?;
    t.serialize_element(&c.im)?;
    t.end()
}

pub fn ser_complex_vec<S: Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for c in v {
        seq.serialize_element(&[c.re, c.im])?;
    }
    seq.end()
}

/// Non-finite values become the strings `"inf"`, `"-inf"`, `"NaN"`.
pub fn ser_f64_inf<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&x.to_string())
    }
}

/// Points as their real coordinates `[x1, x2, y1, y2]`.
pub fn ser_points<S: Serializer>(v: &[TorusPoint], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for p in v {
        seq.serialize_element(&p.coords())?;
    }
    seq.end()
}

fn finite_or_string(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    /// A report-only check did not hold, or a special `Z` made a check
    /// inconclusive. Does not fail the suite.
    Warn,
    Fail,
    Skipped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = "==")]
    Equal,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(serialize_with = "ser_f64_inf")]
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, threshold: f64) -> Self {
        let pass = match relation {
            Relation::Less => value < threshold,
            Relation::AtMost => value <= threshold,
            Relation::Greater => value > threshold,
            Relation::Equal => value == threshold,
        };
        Self {
            name: name.into(),
            value,
            relation,
            threshold,
            pass,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Section {
    pub status: Status,
    pub checks: Vec<Check>,
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Section {
    fn skipped(reason: &str) -> Self {
        Self {
            status: Status::Skipped,
            checks: Vec::new(),
            details: json!({ "reason": reason }),
            error: None,
        }
    }

    /// Status from the checks; a report-only section downgrades failure to
    /// a warning.
    fn from_checks(checks: Vec<Check>, details: Value, report_only: bool) -> Self {
        let ok = checks.iter().all(|c| c.pass);
        let status = match (ok, report_only) {
            (true, _) => Status::Pass,
            (false, true) => Status::Warn,
            (false, false) => Status::Fail,
        };
        Self {
            status,
            checks,
            details,
            error: None,
        }
    }

    fn failed(err: &ThetaError, details: Value, report_only: bool) -> Self {
        Self {
            status: if report_only { Status::Warn } else { Status::Fail },
            checks: Vec::new(),
            details,
            error: Some(err.to_string()),
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Sections {
    pub census: Section,
    pub oddness: Section,
    pub inverse_formula: Section,
    pub quasiperiodicity: Section,
    pub eigenspaces: Section,
    pub translates: Section,
    pub product: Section,
    pub smoothness: Section,
    pub oracle_comparison: Section,
}

impl Sections {
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &Section)> {
        [
            ("census", &self.census),
            ("oddness", &self.oddness),
            ("inverse_formula", &self.inverse_formula),
            ("quasiperiodicity", &self.quasiperiodicity),
            ("eigenspaces", &self.eigenspaces),
            ("translates", &self.translates),
            ("product", &self.product),
            ("smoothness", &self.smoothness),
            ("oracle_comparison", &self.oracle_comparison),
        ]
        .into_iter()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub eps: f64,
    pub seed: u64,
    pub paranoid: bool,
    pub oddness_points: usize,
    pub quasiperiodicity_points: usize,
    pub translate_zeros: usize,
    pub smoothness_points: usize,
    pub oracle_values: usize,
    pub oracle_gradients: usize,
    pub oracle: OracleConfig,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            eps: crate::theta::DEFAULT_EPS,
            seed: 0,
            paranoid: false,
            oddness_points: 200,
            quasiperiodicity_points: 20,
            translate_zeros: 32,
            smoothness_points: 200,
            oracle_values: 200,
            oracle_gradients: 100,
            oracle: OracleConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub tool_version: String,
    /// `[Re z11, Im z11, Re z12, Im z12, Re z22, Im z22]`.
    pub z: [f64; 6],
    pub seed: u64,
    pub config: SuiteConfig,
    pub sections: Sections,
    pub passed: bool,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values serialise");
        s.push('\n');
        s
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

pub fn z_entries(z: &SiegelMatrix) -> [f64; 6] {
    let [a, b, c] = z.entries();
    [a.re, a.im, b.re, b.im, c.re, c.im]
}

/// The random period matrix used for `--random seed`.
pub fn random_siegel(seed: u64) -> SiegelMatrix {
    SiegelMatrix::random(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Independent stream for one section, derived from the suite seed.
fn section_rng(seed: u64, section: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(section);
    rng
}

fn run_section(report_only: bool, f: impl FnOnce() -> Result<Section>) -> Section {
    f().unwrap_or_else(|e| Section::failed(&e, Value::Null, report_only))
}

/// Runs every section; errors are recorded in their section and the
/// remaining sections still run.
pub fn run_suite(z: &SiegelMatrix, config: &SuiteConfig) -> Result<SuiteReport> {
    if !(config.eps > 0.0 && config.eps.is_finite()) {
        return Err(ThetaError::InvalidEps(config.eps));
    }
    let divisor = ThetaDivisor::new(*z, config.eps)?;
    let product = z.is_diagonal();
    let sections = Sections {
        census: census_section(&divisor, product),
        oddness: run_section(false, || oddness_section(&divisor, config)),
        inverse_formula: run_section(false, || inverse_formula_section(z, config.eps)),
        quasiperiodicity: run_section(false, || quasiperiodicity_section(z, config)),
        eigenspaces: run_section(false, || eigenspace_section(z, config.eps)),
        translates: run_section(true, || translates_section(&divisor, config)),
        product: if product {
            run_section(false, || product_section(z, config.eps))
        } else {
            Section::skipped("Z is not diagonal")
        },
        smoothness: run_section(true, || smoothness_section(&divisor, config)),
        oracle_comparison: if config.paranoid {
            run_section(false, || oracle_section(z, config))
        } else {
            Section::skipped("enable with --paranoid")
        },
    };
    let passed = sections.iter().all(|(_, s)| s.passed());
    Ok(SuiteReport {
        tool_version: TOOL_VERSION.to_string(),
        z: z_entries(z),
        seed: config.seed,
        config: *config,
        sections,
        passed,
    })
}

fn partition_bits(on: &[RealCharacteristic]) -> Vec<String> {
    on.iter().map(|c| c.to_string()).collect()
}

/// Generic `Z`: ten points on `C_A` and a genus 0 quotient. Diagonal `Z`:
/// thirteen points, and a separation failure is only a warning.
fn census_section(divisor: &ThetaDivisor, product: bool) -> Section {
    let expected = if product { 13.0 } else { 10.0 };
    let result = match census_with(divisor) {
        Ok(r) => r,
        Err(ThetaError::SeparationFailure(r)) => {
            let details = serde_json::to_value(&*r).unwrap_or(Value::Null);
            return Section::failed(&ThetaError::SeparationFailure(r), details, product);
        }
        Err(e) => return Section::failed(&e, Value::Null, false),
    };
    let on = result.on_count() as f64;
    let mut checks = vec![
        Check::new("on_count", on, Relation::Equal, expected),
        Check::new("separation_ratio", result.separation_ratio, Relation::Greater, MIN_SEPARATION),
    ];
    let mut stability = Vec::new();
    let mut changes = 0.0;
    for eps in [1e-10, 1e-14] {
        let other = ThetaDivisor::new(divisor.z, eps).and_then(|d| census_with(&d));
        let same = matches!(&other, Ok(o) if o.on_points == result.on_points);
        if !same {
            changes += 1.0;
        }
        stability.push(json!({ "eps": eps, "same_partition": same }));
    }
    checks.push(Check::new("partition_changes_across_eps", changes, Relation::Equal, 0.0));
    let quotient_genus = if product {
        None
    } else {
        let g = hurwitz_quotient_genus(4, result.on_count() as u32);
        checks.push(Check::new(
            "quotient_genus",
            g.map_or(f64::NAN, f64::from),
            Relation::Equal,
            0.0,
        ));
        g
    };
    let details = json!({
        "on_count": result.on_count(),
        "on_points": partition_bits(&result.on_points),
        "off_points": partition_bits(&result.off_points),
        "values": result.values,
        "separation_ratio": finite_or_string(result.separation_ratio),
        "scale": result.scale,
        "eps_stability": stability,
        "quotient_genus": quotient_genus,
    });
    Section::from_checks(checks, details, false)
}

fn oddness_section(divisor: &ThetaDivisor, config: &SuiteConfig) -> Result<Section> {
    let mut rng = section_rng(config.seed, 1);
    let mut worst_ratio: f64 = 0.0;
    let mut worst_abs: f64 = 0.0;
    for _ in 0..config.oddness_points {
        let v = random_cell_point(&divisor.z, &mut rng).v;
        let a = divisor.value(&v)?;
        let b = divisor.value(&(-v))?;
        let sum = (a.value + b.value).norm();
        worst_abs = worst_abs.max(sum);
        worst_ratio = worst_ratio.max(sum / (a.error_bound() + b.error_bound()));
    }
    Ok(Section::from_checks(
        vec![Check::new(
            "max |theta_A(v) + theta_A(-v)| / error bound",
            worst_ratio,
            Relation::AtMost,
            ODDNESS_RATIO,
        )],
        json!({ "points": config.oddness_points, "max_abs_sum": worst_abs, "scale": divisor.scale }),
        false,
    ))
}

fn inverse_formula_section(z: &SiegelMatrix, eps: f64) -> Result<Section> {
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for ch in two_torsion_points() {
        let c = ComplexCharacteristic::from_two_torsion(z, &ch);
        let mut per = Vec::new();
        for eta in KernelShift::all() {
            let r = inverse_formula_residual(z, &c, eta, eps)?;
            worst = worst.max(r);
            per.push(r);
        }
        rows.push(json!({ "characteristic": ch.to_string(), "residuals": per }));
    }
    Ok(Section::from_checks(
        vec![Check::new("max residual", worst, Relation::Less, INVERSE_FORMULA_THRESHOLD)],
        json!({ "shifts": [0, 1, -1], "per_characteristic": rows }),
        false,
    ))
}

/// The four generators `Z e1, Z e2, D e1, D e2` and their negatives.
pub fn lattice_basis(z: &SiegelMatrix) -> Vec<(String, CVec2)> {
    let gens = [
        ("Z e1", [1, 0], [0, 0]),
        ("Z e2", [0, 1], [0, 0]),
        ("D e1", [0, 0], [1, 0]),
        ("D e2", [0, 0], [0, 1]),
    ];
    let mut out = Vec::new();
    for sign in [1i64, -1] {
        for (name, m, n) in gens {
            let label = if sign > 0 { name.to_string() } else { format!("-{name}") };
            out.push((
                label,
                lattice_vector(z, [sign * m[0], sign * m[1]], [sign * n[0], sign * n[1]]),
            ));
        }
    }
    out
}

fn quasiperiodicity_section(z: &SiegelMatrix, config: &SuiteConfig) -> Result<Section> {
    let mut rng = section_rng(config.seed, 2);
    let chars = [RealCharacteristic::ZERO, OMEGA_CHAR, RealCharacteristic::new([0.5, 0.0], [0.5, 0.0])];
    let mut worst: f64 = 0.0;
    let mut per_vector = Vec::new();
    for (name, lambda) in lattice_basis(z) {
        let mut w: f64 = 0.0;
        for _ in 0..config.quasiperiodicity_points {
            let v = random_cell_point(z, &mut rng).v;
            for ch in &chars {
                w = w.max(quasiperiodicity_residual(z, ch, &lambda, &v, config.eps)?);
            }
        }
        worst = worst.max(w);
        per_vector.push(json!({ "vector": name, "max_residual": w }));
    }
    Ok(Section::from_checks(
        vec![Check::new("max relative residual", worst, Relation::Less, QUASIPERIODICITY_THRESHOLD)],
        json!({
            "characteristics": chars.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "points_per_vector": config.quasiperiodicity_points,
            "per_vector": per_vector,
        }),
        false,
    ))
}

fn eigenspace_section(z: &SiegelMatrix, eps: f64) -> Result<Section> {
    let mut mismatches = 0.0;
    let mut rows = Vec::new();
    for ch in two_torsion_points() {
        let a = eigenspace_analysis(z, &ComplexCharacteristic::from_two_torsion(z, &ch), eps)?;
        let even = parity(&ch)? == 1;
        let expected = if even { (2, 1) } else { (1, 2) };
        if (a.h_plus, a.h_minus) != expected {
            mismatches += 1.0;
        }
        rows.push(json!({
            "characteristic": ch.to_string(),
            "parity": if even { "even" } else { "odd" },
            "dims": [a.h_plus, a.h_minus],
            "singular_values_plus": a.sv_plus,
            "singular_values_minus": a.sv_minus,
        }));
    }
    Ok(Section::from_checks(
        vec![Check::new("characteristics with unexpected dimensions", mismatches, Relation::Equal, 0.0)],
        json!({ "per_characteristic": rows }),
        false,
    ))
}

fn translates_section(divisor: &ThetaDivisor, config: &SuiteConfig) -> Result<Section> {
    let handles = translates_of(divisor);
    let zeros = sample_curve_points_with(divisor, config.translate_zeros, config.seed ^ 0x7a4e)?;
    let w = translate_witnesses(&handles, &zeros.points)?;
    let missing = w.pairs.iter().filter(|p| p.witness.is_none()).count() as f64;
    let weakest = w.pairs.iter().map(|p| p.best_ratio).fold(f64::INFINITY, f64::min);
    Ok(Section::from_checks(
        vec![
            Check::new("translates", handles.len() as f64, Relation::Equal, 9.0),
            Check::new("ordered pairs without witness", missing, Relation::Equal, 0.0),
        ],
        json!({
            "shifts": handles.iter().map(|h| h.shift).collect::<Vec<_>>(),
            "zeros_used": w.zeros_used,
            "weakest_witness_ratio": weakest,
            "pairs": w.pairs,
        }),
        true,
    ))
}

fn product_section(z: &SiegelMatrix, eps: f64) -> Result<Section> {
    let [t1, _, t2] = z.entries();
    let r = product_components(t1, t2, eps)?;
    let lines = product_line_zeros(t1, t2, eps)?;
    let mut checks: Vec<Check> = r
        .components
        .iter()
        .map(|c| Check::new(format!("residual on {}", c.name), c.residual, Relation::Less, COMPONENT_THRESHOLD))
        .collect();
    checks.extend([
        Check::new("off-component minimum", r.off_component_min, Relation::Greater, OFF_COMPONENT_THRESHOLD),
        Check::new("factorization residual", r.factorization_residual, Relation::Less, FACTORIZATION_THRESHOLD),
        Check::new("node gradient", r.node_gradient, Relation::Less, NODE_GRADIENT_THRESHOLD),
        Check::new(
            "intersections not 2-torsion",
            r.intersections_two_torsion.iter().filter(|ok| !**ok).count() as f64,
            Relation::Equal,
            0.0,
        ),
        Check::new("v1-line zero count", lines.v1_count as f64, Relation::Equal, 1.0),
        Check::new("v2-line zero count", lines.v2_count as f64, Relation::Equal, 3.0),
        Check::new("root distance", lines.root_error, Relation::Less, ROOT_MATCH_THRESHOLD),
    ]);
    Ok(Section::from_checks(checks, json!({ "components": r, "lines": lines }), false))
}

fn smoothness_section(divisor: &ThetaDivisor, config: &SuiteConfig) -> Result<Section> {
    let sample = sample_curve_points_with(divisor, config.smoothness_points, config.seed ^ 0x5300)?;
    let s = smoothness_from_sample(&sample, config.seed ^ 0x5300)?;
    Ok(Section::from_checks(
        vec![Check::new(
            "min gradient / scale",
            s.min_gradient_relative,
            Relation::Greater,
            SMOOTHNESS_THRESHOLD,
        )],
        json!({ "statistics": s, "lines_used": sample.lines_used, "lines_failed": sample.lines_failed }),
        true,
    ))
}

/// Random oracle inputs: real coordinates in `[-1/2, 1/2)` and a random
/// 2-torsion characteristic.
pub fn oracle_input<R: rand::Rng>(z: &SiegelMatrix, rng: &mut R) -> (RealCharacteristic, CVec2) {
    let chars = two_torsion_points();
    let ch = chars[rng.random_range(0..chars.len())];
    let x = RVec2::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
    let y = RVec2::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
    (ch, TorusPoint::from_real(z, x, y).v)
}

/// `|a - b| / max(1, |b|)`.
pub fn oracle_distance(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

fn oracle_section(z: &SiegelMatrix, config: &SuiteConfig) -> Result<Section> {
    let mut rng = section_rng(config.seed, 3);
    let mut worst_value: f64 = 0.0;
    for _ in 0..config.oracle_values {
        let (ch, v) = oracle_input(z, &mut rng);
        let primary = classical_theta(z, &ch, &v, config.eps)?.value;
        let direct = direct_theta(z, &ch, &v, config.oracle.box_radius);
        worst_value = worst_value.max(oracle_distance(primary, direct));
    }
    let mut worst_grad: f64 = 0.0;
    let mut compared = 0usize;
    for _ in 0..config.oracle_gradients {
        let (ch, v) = oracle_input(z, &mut rng);
        let g = classical_theta_gradient(z, &ch, &v, config.eps)?;
        let fd = fd_gradient(z, &ch, &v, &config.oracle);
        let gn = g[0].value.norm().hypot(g[1].value.norm());
        if gn > ORACLE_GRADIENT_FLOOR {
            let diff = (g[0].value - fd[0]).norm().hypot((g[1].value - fd[1]).norm());
            worst_grad = worst_grad.max(diff / gn);
            compared += 1;
        }
    }
    Ok(Section::from_checks(
        vec![
            Check::new("value distance", worst_value, Relation::Less, ORACLE_VALUE_THRESHOLD),
            Check::new("gradient relative error", worst_grad, Relation::Less, ORACLE_GRADIENT_THRESHOLD),
        ],
        json!({
            "value_inputs": config.oracle_values,
            "gradient_inputs": config.oracle_gradients,
            "gradients_compared": compared,
            "box_radius": config.oracle.box_radius,
            "fd_step": config.oracle.fd_step,
        }),
        false,
    ))
}

/// Header of the trace CSV.
pub const TRACE_HEADER: &str = "x1,x2,y1,y2,re_theta,im_theta,grad_norm";

/// Writes `n` sampled points of `C_A` as CSV, one row per point, with real
/// coordinates in `[0, 1)`.
pub fn emit_trace(z: &SiegelMatrix, n: usize, seed: u64, eps: f64, out: &Path) -> Result<usize> {
    let divisor = ThetaDivisor::new(*z, eps)?;
    let sample = sample_curve_points_with(&divisor, n, seed)?;
    let mut buf = String::with_capacity(64 * (n + 1));
    buf.push_str(TRACE_HEADER);
    buf.push('\n');
    for (p, g) in sample.points.iter().zip(&sample.gradient_norms) {
        let t = divisor.value(&p.v)?.value;
        let c = p.coords();
        buf.push_str(&format!("{:?},{:?},{:?},{:?},{:?},{:?},{:?}\n", c[0], c[1], c[2], c[3], t.re, t.im, g));
    }
    let mut f = std::fs::File::create(out)?;
    f.write_all(buf.as_bytes())?;
    Ok(sample.len())
}
