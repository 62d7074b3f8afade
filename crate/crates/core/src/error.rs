use thiserror::Error;

/// Errors raised by the geometry, kernel and quadrature routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dimension {0} is not supported (1 <= n <= 20)")]
    UnsupportedDimension(usize),

    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),

    #[error("point is not in the Siegel domain (rho = {rho})")]
    OutsideDomain { rho: f64 },

    #[error("point is not in the open unit ball (|xi| = {norm})")]
    OutsideBall { norm: f64 },

    #[error("Cayley transform pole: xi_n = -1")]
    CayleyPole,

    #[error("radius must be positive, got {0}")]
    InvalidRadius(f64),

    #[error("invalid exponent {name} = {value}: {reason}")]
    InvalidExponent {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("gamma function undefined at x = {0}")]
    GammaDomain(f64),

    #[error("gamma function overflows at x = {0}")]
    GammaOverflow(f64),

    #[error("region is empty")]
    EmptyRegion,

    #[error("region is unbounded in the Bergman metric; lattices need rho_min > 0 and finite extent")]
    UnboundedRegion,

    #[error("sample count must be at least 1")]
    NoSamples,

    #[error("rejected {rejected} of {count} samples (budget {budget})")]
    RejectionBudget {
        rejected: usize,
        count: usize,
        budget: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("L^p norm is not finite")]
    DivergentNorm,

    #[error("invalid sampler: {0}")]
    InvalidSampler(&'static str),

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
