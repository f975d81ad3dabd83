use thiserror::Error;

/// Errors raised by the catalog, the integrators and the CLI front end.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A parameter, point or group element lies outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The requested group pair (or family variant) is not in the catalog.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The integrator ran out of budget before reaching its tolerance.
    #[error("integration failed: {message} (best estimate {best_estimate:e}, error {error_estimate:e})")]
    Integration {
        message: String,
        best_estimate: f64,
        error_estimate: f64,
    },

    #[error("no convergence after {iterations} iterations: {message} (gradient norm {gradient_norm:e})")]
    Convergence {
        message: String,
        iterations: usize,
        gradient_norm: f64,
    },

    /// The likelihood has no maximiser in the interior of the parameter domain.
    #[error("maximum likelihood estimate does not exist: {0}")]
    NonExistence(String),

    #[error("sampler failure: {0}")]
    Sampler(String),

    /// Malformed JSON/CSV input or an unknown field.
    #[error("schema error: {0}")]
    Schema(String),

    /// A chart constraint broke after an operation that should preserve it.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn dims(expected: usize, got: usize) -> Self {
        Error::DimensionMismatch { expected, got }
    }

    /// Process exit status used by the CLI and mirrored by the C ABI status codes.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Unsupported(_) | Error::Schema(_) => 2,
            Error::Domain(_) | Error::DimensionMismatch { .. } | Error::NonExistence(_) => 3,
            Error::Integration { .. }
            | Error::Convergence { .. }
            | Error::Sampler(_)
            | Error::Internal(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
