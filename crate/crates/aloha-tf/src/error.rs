use thiserror::Error;

/// Errors surfaced by solvers, model constructors, and the verification tools.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Target throughput outside the open unit interval.
    #[error("theta must lie in (0,1)")]
    ThetaOutOfRange { theta: f64 },

    /// User count below the minimum the operation supports.
    #[error("n must be at least {min} (got {n})")]
    InvalidN { n: usize, min: usize },

    /// A control component outside [0,1), or an empty control.
    #[error("invalid control vector: {reason}")]
    InvalidControl { reason: String },

    /// A rate component outside [0,1].
    #[error("invalid rate vector: {reason}")]
    InvalidRate { reason: String },

    /// Jain's fairness is undefined for the all-zero rate vector.
    #[error("zero rate vector has no Jain fairness")]
    ZeroVector,

    /// Restricted-control parameters (p_s, k, n') violate their constraints.
    #[error("invalid restricted control: {reason}")]
    InvalidParameters { reason: String },

    /// (k, n') or p_s outside the valid parameter box of the restricted family.
    #[error("domain error: {reason}")]
    Domain { reason: String },

    /// alpha-fair solvers require alpha >= 1.
    #[error("alpha must be >= 1 (got {alpha})")]
    AlphaOutOfRange { alpha: f64 },

    /// theta below theta_n: the two-value machinery does not apply there.
    #[error("theta {theta} below theta_n = {theta_n}; use the equal-rate regime")]
    OutOfRegime { theta: f64, theta_n: f64 },

    /// Curve grid cannot resolve the feature being checked.
    #[error("grid too coarse: {reason}")]
    GridTooCoarse { reason: String },

    /// Malformed grid specification.
    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: String },

    /// Oracle throughput band admits no grid point.
    #[error("no grid point within throughput band {band} of theta {theta}")]
    NoFeasiblePoint { theta: f64, band: f64 },

    /// The brute-force oracle only scans n <= 4.
    #[error("oracle supports n <= 4 (got {n})")]
    OracleUnsupportedN { n: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
