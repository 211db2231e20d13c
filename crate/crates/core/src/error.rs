//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error(
        "matrix deviates from Hermitian symmetry by {deviation:.3e} (tolerance {tolerance:.0e})"
    )]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix deviates from unitarity by {deviation:.3e} (tolerance {tolerance:.0e})")]
    NotUnitary { deviation: f64, tolerance: f64 },

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("state vector has zero norm")]
    ZeroVector,

    #[error("invalid projector set: {0}")]
    IncompleteProjectorSet(String),

    #[error("not a valid density matrix: {0}")]
    InvalidDensity(String),

    #[error("correlation blocks overlap on label `{0}`")]
    OverlappingBlocks(String),

    #[error("partition does not cover the state: {0}")]
    CoverageError(String),

    #[error("global state is not pure (|tr rho^2 - 1| = {0:.3e})")]
    MixedState(f64),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("Fock cutoff inadequate: top-level population {0:.3e} exceeds 1e-8")]
    CutoffExceeded(f64),

    #[error("degenerate swap branch: {0}")]
    DegenerateBranch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
