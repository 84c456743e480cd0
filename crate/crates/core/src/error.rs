use thiserror::Error;

use crate::chain::CoreChain;

pub type Result<T> = std::result::Result<T, LeviError>;

#[derive(Debug, Error)]
pub enum LeviError {
    #[error("matrix is not Hermitian: entry ({row}, {col}) differs from its mirror by {defect:e}")]
    NotHermitian { row: usize, col: usize, defect: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid set description: {0}")]
    InvalidSet(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("point is off the boundary: |rho| = {0:e}")]
    OffBoundary(f64),

    #[error("gradient of the defining function vanishes")]
    ZeroGradient,

    #[error("nonpseudoconvex point: minimal Levi eigenvalue {min:e} is below -{bound:e}")]
    NonPseudoconvex { min: f64, bound: f64 },

    #[error("derived-distribution chain did not stabilize within {max_iter} iterations")]
    NotStabilized {
        max_iter: usize,
        chain: Box<CoreChain>,
    },

    #[error("invariant breach: {0}")]
    InvariantBreach(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LeviError {
    /// Process exit code used by the CLI for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            LeviError::NotStabilized { .. } => 3,
            LeviError::InvariantBreach(_) => 4,
            LeviError::Io(_) => 1,
            _ => 2,
        }
    }
}
