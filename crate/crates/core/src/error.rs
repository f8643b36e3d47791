use thiserror::Error;

/// Errors raised by the geometry, solver and estimator routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unbounded: the constraint normals do not positively span the space")]
    Unbounded,

    #[error("degenerate body: {0}")]
    Degenerate(String),

    #[error("origin is not an interior point")]
    OriginNotInterior,

    #[error("dimension {0} is outside the supported range")]
    UnsupportedDimension(usize),

    #[error("singular linear map")]
    Singular,

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("body is not in John position: offset {offset} below 1 - {tolerance:e}")]
    NotJohnPosition { offset: f64, tolerance: f64 },

    #[error("identity decomposition infeasible (residual {residual:e})")]
    Infeasible { residual: f64 },

    #[error("barycenter |sum c_i u_i| = {0:e} exceeds tolerance")]
    NonzeroBarycenter(f64),

    #[error("weights sum to {sum}, expected {expected}")]
    TraceViolation { sum: f64, expected: f64 },

    #[error("density is not integrable: {0}")]
    NonIntegrableDensity(String),

    #[error("right-hand side integral is zero")]
    ZeroIntegral,

    #[error("gauge is not coercive")]
    NonCoercive,

    #[error("basis matrix is rank deficient")]
    RankDeficient,

    #[error("inscribed radius violated: gauge {gauge} > {limit}")]
    RadiusViolation { gauge: f64, limit: f64 },

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
