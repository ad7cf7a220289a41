use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure modes shared across the numerical modules.
///
/// `InvalidArgument` and `Unsupported` are caller mistakes; the remaining
/// variants report numerical trouble.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("coincident points: separation {separation:e} below {min:e}")]
    Coincident { separation: f64, min: f64 },

    #[error("divergent evaluation: {0}")]
    Divergent(String),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("dimension {dim} exceeds the guard {limit} (N = {atoms}, n = {excitations})")]
    DimensionGuard {
        dim: usize,
        limit: usize,
        atoms: usize,
        excitations: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigensolver failed on a {dim}x{dim} matrix: {reason}")]
    Eigensolver { dim: usize, reason: String },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("numerical range: {0}")]
    Range(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_)
                | Error::Unsupported(_)
                | Error::DimensionGuard { .. }
                | Error::DimensionMismatch { .. }
        )
    }
}
