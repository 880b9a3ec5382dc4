use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed spec: {0}")]
    MalformedSpec(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid self-similar part: {0}")]
    InvalidIfs(String),

    #[error("coefficient index {k} exceeds the safe window {limit} for {points} quadrature points")]
    ResolutionExceeded { k: i64, limit: i64, points: usize },

    #[error("quadrature points must be a power of two, got {0}")]
    QuadratureNotPowerOfTwo(usize),

    #[error("index {requested} lies outside the table window {window} (need a window of at least {requested})")]
    WindowExceeded { requested: i64, window: usize },

    #[error("invalid interval set: {0}")]
    InvalidIntervals(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cannot certify at horizon {horizon}: {reason}")]
    FailsToCertify { horizon: usize, reason: String },

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("truncation dimension {dimension} too small: need at least {required}")]
    InsufficientMargin { dimension: usize, required: usize },

    #[error("invariant breached: {0}")]
    InvariantBreach(String),
}

impl Error {
    /// Errors caused by the resolution of a table or quadrature rule rather
    /// than by malformed input.
    pub fn is_resolution(&self) -> bool {
        matches!(
            self,
            Error::ResolutionExceeded { .. } | Error::WindowExceeded { .. } | Error::InsufficientMargin { .. }
        )
    }
}
