use thiserror::Error;

use crate::divisor::CensusResult;

pub type Result<T, E = ThetaError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ThetaError {
    #[error("imaginary part of Z is not positive definite (smallest eigenvalue {lambda_min:e})")]
    NotPositiveDefinite { lambda_min: f64 },

    #[error("characteristic entries must lie in {{0, 1/2}}")]
    NotHalfInteger,

    #[error("polarisation type ({d1},{d2}) is invalid: need 1 <= d1 and d1 | d2")]
    InvalidPolarization { d1: u32, d2: u32 },

    #[error("tolerance must be positive and finite, got {0:e}")]
    InvalidEps(f64),

    #[error("truncation radius {radius} exceeds the limit; reduce the argument or loosen eps")]
    EpsTooSmall { radius: f64 },

    #[error("shift is not an element of K(L)_1 = {{0, ω, -ω}}")]
    EtaNotInKernel,

    #[error("vector is not in the period lattice (real coordinates {coords:?})")]
    NotLatticeVector { coords: [f64; 4] },

    #[error("numerical rank is ambiguous, singular values (relative) {singular_values:?}")]
    RankAmbiguous { singular_values: Vec<f64> },

    #[error("on/off separation ratio {} is below the required 1e3", .0.separation_ratio)]
    SeparationFailure(Box<CensusResult>),

    #[error("{component}: residual {residual:e} exceeds {threshold:e}")]
    ComponentResidualTooLarge {
        component: String,
        residual: f64,
        threshold: f64,
    },

    #[error("a zero lies on the contour and jittering did not move it off")]
    BoundaryZero,

    #[error("rectangle subdivision exceeded depth {depth}")]
    QuadratureStall { depth: u32 },

    #[error("Newton iteration failed to converge in window corner={corner}, {width}x{height}")]
    NewtonDivergence {
        corner: String,
        width: f64,
        height: f64,
    },

    #[error("only {found} of {requested} curve points found after {lines} lines")]
    SamplingExhausted {
        found: usize,
        requested: usize,
        lines: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
