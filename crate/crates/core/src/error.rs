use thiserror::Error;

/// Errors raised by the numerical layer and the scheme/model builders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix is not Hermitian: residual {residual:e} exceeds tolerance {tolerance:e}")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("eigensolver failed to converge on a {dim}x{dim} matrix")]
    EigenSolver { dim: usize },

    #[error("requested dimension {requested} exceeds the limit {limit}")]
    DimensionTooLarge { requested: u128, limit: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state has zero norm and cannot be renormalized")]
    ZeroNorm,

    #[error("amplitudes became non-finite at step {step}")]
    Diverged { step: usize },

    #[error("fit needs at least {required} usable points, got {usable}")]
    TooFewPoints { usable: usize, required: usize },

    #[error("unknown scheme label {0:?}")]
    UnknownScheme(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
