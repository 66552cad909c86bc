//! Error type shared by every module.

use thiserror::Error;

/// Failures reported by assembly, solvers and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    /// A user supplied parameter is out of range or inconsistent.
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },

    /// Two operands have incompatible sizes.
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: String,
        expected: usize,
        got: usize,
    },

    /// A direct factorization failed or produced a singular factor.
    #[error("factorization failed: {0}")]
    Factorization(String),

    /// The coarse matrix built from the coarse space is rank deficient.
    #[error(
        "coarse matrix has rank {rank} < {dim}: the coarse space violates \
         P(A v) != 0 for nonzero v in the coarse space"
    )]
    SingularCoarse { rank: usize, dim: usize },

    /// A sampled coarse space has fewer independent directions than requested.
    #[error("degenerate coarse space: numerical rank {rank} < requested {requested} (reduce m)")]
    DegenerateCoarseSpace { rank: usize, requested: usize },

    /// Dense assembly was requested above the configured size cap.
    #[error("dense size {size} exceeds cap {cap}")]
    SizeCap { size: usize, cap: usize },

    /// The iteration stopped because the error grew.
    #[error("iteration diverged at cycle {iteration}: error {error:e}")]
    Diverged { iteration: usize, error: f64 },

    /// Eigenvalue or singular value computation did not converge.
    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn dimension(context: impl Into<String>, expected: usize, got: usize) -> Self {
        Error::Dimension {
            context: context.into(),
            expected,
            got,
        }
    }
}
