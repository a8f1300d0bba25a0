use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least {min}, got {got}")]
    Dimension { min: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular matrix: {0}")]
    Singular(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point at distance {norm} is not outside the ball of radius {radius}")]
    PointInsideBall { norm: f64, radius: f64 },

    #[error("point set is affinely degenerate (rank {rank} < {needed})")]
    Degenerate { rank: usize, needed: usize },

    #[error("iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("region of radius {required} exceeds the declared window of radius {window}")]
    OutOfWindow { required: f64, window: f64 },

    #[error("enumeration would visit more than {limit} candidate cells")]
    EnumerationBudget { limit: u64 },

    #[error("schedule out of range: {0}")]
    ScheduleRange(String),

    #[error("window radius {window} is too small: the distance needs 1/eps = {needed}")]
    WindowInsufficient { needed: f64, window: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error in field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
