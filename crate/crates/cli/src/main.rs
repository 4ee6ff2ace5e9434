//! `theta13`: evaluate theta functions on a (1,3)-polarised abelian surface
//! and run the divisor verification suite.
//!
//! Exit status: 0 when every check passes, 1 when one fails, 2 on invalid
//! input.

use clap::{ArgGroup, Parser, Subcommand};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

use theta13::divisor::{translate_witnesses, translates_of};
use theta13::input::{parse_characteristic, parse_complex, parse_cvec2, parse_siegel};
use theta13::report::{emit_trace, random_siegel, run_suite, z_entries, SuiteConfig};
use theta13::zeros::{product_line_zeros, sample_curve_points_with, smoothness_from_sample};
use theta13::{
    census_with, classical_theta_with_gradient, product_components, Complex64, SiegelMatrix, ThetaDivisor, ThetaError,
};

#[derive(Parser, Debug)]
#[command(name = "theta13", version, about)]
struct Cli {
    /// Absolute truncation tolerance for every theta series.
    #[arg(long, global = true, env = "THETA13_EPS", default_value_t = 1e-12)]
    eps: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a random period matrix as `z11,z12,z22`.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate a classical theta function and its gradient.
    Theta {
        /// Period matrix entries `z11,z12,z22`, e.g. `i,0.1,1.5i`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Characteristic `c1a,c1b,c2a,c2b`; fractions such as `1/2` are allowed.
        #[arg(long = "char", default_value = "0,0,0,0", allow_hyphen_values = true)]
        characteristic: String,
        /// Argument `v1,v2`.
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
    /// Evaluate theta_A at the sixteen 2-torsion points.
    Census {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Certify that the nine kernel translates of C_A are distinct.
    Translates {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Number of curve points used as witnesses.
        #[arg(long, default_value_t = 32)]
        zeros: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the decomposition of C_A for Z = diag(tau1, tau2).
    Product {
        #[arg(long, allow_hyphen_values = true)]
        tau1: String,
        #[arg(long, allow_hyphen_values = true)]
        tau2: String,
    },
    /// Gradient statistics over sampled points of C_A.
    Smoothness {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(short = 'n', default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write sampled points of C_A to a CSV file.
    Trace {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(short = 'n', default_value_t = 100)]
        n: usize,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run every verification section and print a JSON report.
    #[command(group(ArgGroup::new("input").required(true).args(["z", "random"])))]
    Suite {
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        /// Use the random period matrix generated from this seed.
        #[arg(long, value_name = "SEED")]
        random: Option<u64>,
        /// Seed for sampling; defaults to the `--random` seed, else 0.
        #[arg(long)]
        seed: Option<u64>,
        /// Also compare against the brute-force oracle.
        #[arg(long)]
        paranoid: bool,
        /// Curve points used by the smoothness section.
        #[arg(long, default_value_t = 200)]
        smoothness_points: usize,
    },
}

enum Failure {
    Input(String),
    Numeric(String),
}

impl From<ThetaError> for Failure {
    fn from(e: ThetaError) -> Self {
        match e {
            ThetaError::NotPositiveDefinite { .. }
            | ThetaError::NotHalfInteger
            | ThetaError::InvalidPolarization { .. }
            | ThetaError::InvalidEps(_)
            | ThetaError::InvalidInput(_) => Failure::Input(e.to_string()),
            other => Failure::Numeric(other.to_string()),
        }
    }
}

fn print_json(value: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("serialisable"));
}

fn format_complex(c: Complex64) -> String {
    format!("{}{:+}i", c.re, c.im)
}

fn check_eps(eps: f64) -> Result<(), Failure> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(ThetaError::InvalidEps(eps).into())
    }
}

/// Runs the command; `Ok(true)` means every check passed.
fn run(cli: Cli) -> Result<bool, Failure> {
    let eps = cli.eps;
    check_eps(eps)?;
    match cli.command {
        Command::Gen { seed } => {
            let z = random_siegel(seed);
            let [a, b, c] = z.entries();
            println!("{},{},{}", format_complex(a), format_complex(b), format_complex(c));
            Ok(true)
        }
        Command::Theta { z, characteristic, v } => {
            let z = parse_siegel(&z)?;
            let ch = parse_characteristic(&characteristic)?;
            let v = parse_cvec2(&v)?;
            let (value, grad) = classical_theta_with_gradient(&z, &ch, &v, eps)?;
            print_json(&json!({
                "z": z_entries(&z),
                "characteristic": ch,
                "v": [[v[0].re, v[0].im], [v[1].re, v[1].im]],
                "eps": eps,
                "theta": value,
                "gradient": grad,
            }));
            Ok(true)
        }
        Command::Census { z } => {
            let z = parse_siegel(&z)?;
            let divisor = ThetaDivisor::new(z, eps)?;
            match census_with(&divisor) {
                Ok(r) => {
                    print_json(&r);
                    Ok(true)
                }
                Err(ThetaError::SeparationFailure(r)) => {
                    print_json(&*r);
                    eprintln!("separation ratio {} is below 1e3", r.separation_ratio);
                    Ok(false)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Translates { z, zeros, seed } => {
            let z = parse_siegel(&z)?;
            let divisor = ThetaDivisor::new(z, eps)?;
            let handles = translates_of(&divisor);
            let sample = sample_curve_points_with(&divisor, zeros, seed)?;
            let w = translate_witnesses(&handles, &sample.points)?;
            print_json(&w);
            Ok(w.all_distinct)
        }
        Command::Product { tau1, tau2 } => {
            let (t1, t2) = (parse_complex(&tau1)?, parse_complex(&tau2)?);
            let r = product_components(t1, t2, eps)?;
            let lines = product_line_zeros(t1, t2, eps)?;
            let ok = r.passes() && lines.v1_count == 1 && lines.v2_count == 3;
            print_json(&json!({ "components": r, "lines": lines }));
            Ok(ok)
        }
        Command::Smoothness { z, n, seed } => {
            let z = parse_siegel(&z)?;
            let divisor = ThetaDivisor::new(z, eps)?;
            let sample = sample_curve_points_with(&divisor, n, seed)?;
            print_json(&smoothness_from_sample(&sample, seed)?);
            Ok(true)
        }
        Command::Trace { z, n, out, seed } => {
            let z = parse_siegel(&z)?;
            let rows = emit_trace(&z, n, seed, eps, &out)?;
            eprintln!("wrote {rows} points to {}", out.display());
            Ok(true)
        }
        Command::Suite {
            z,
            random,
            seed,
            paranoid,
            smoothness_points,
        } => {
            let matrix: SiegelMatrix = match (&z, random) {
                (Some(z), _) => parse_siegel(z)?,
                (None, Some(s)) => random_siegel(s),
                (None, None) => unreachable!("clap requires one of --z, --random"),
            };
            let config = SuiteConfig {
                eps,
                seed: seed.or(random).unwrap_or(0),
                paranoid,
                smoothness_points,
                ..SuiteConfig::default()
            };
            let report = run_suite(&matrix, &config)?;
            print!("{}", report.to_json());
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
