//! Riemann theta functions on a `(1,3)`-polarised abelian surface
//! `A = C^2 / (Z Z^2 + D Z^2)` with `D = diag(1, 3)`, and numerical checks of
//! the odd theta divisor `C_A = (theta_A = 0)`.
//!
//! - [`torus`]: period matrices, lattice reduction, forms, 2-torsion and the
//!   polarisation kernel.
//! - [`theta`]: classical and canonical theta functions with certified
//!   truncation bounds.
//! - [`divisor`]: `theta_A`, the 2-torsion census, kernel translates and the
//!   product case.
//! - [`zeros`]: argument-principle zero counting on complex lines and
//!   sampling of `C_A`.
//! - [`oracle`]: brute-force reference computations.
//! - [`report`]: the verification suite and its JSON report.

pub mod divisor;
pub mod error;
pub mod input;
pub mod oracle;
pub mod report;
pub mod theta;
pub mod torus;
pub mod zeros;

pub use divisor::{
    census_with, genus_of_polarization, kernel_translates, product_components, theta_a, theta_a_canonical, theta_al,
    two_torsion_census, CensusResult, DivisorHandle, ProductReport, ThetaDivisor,
};
pub use error::{Result, ThetaError};
pub use num_complex::Complex64;
pub use oracle::{direct_theta, enumerate_parities, fd_gradient, OracleConfig};
pub use report::{emit_trace, run_suite, Status, SuiteConfig, SuiteReport};
pub use theta::{
    canonical_theta, canonical_theta_shifted, classical_theta, classical_theta_gradient, classical_theta_with_gradient, eigenspace_dims,
    ComplexCharacteristic, KernelShift, ThetaValue, DEFAULT_EPS,
};
pub use torus::{
    make_siegel, parity, polarization_kernel, reduce_mod_lattice, two_torsion_points, CVec2, KernelElement,
    PolarizationType, RVec2, RealCharacteristic, SiegelMatrix, TorusPoint,
};
pub use zeros::{
    count_zeros_on_rectangle, locate_zeros_on_line, sample_curve_points, smoothness_report, ComplexLine,
    CurveSample, Window,
};
