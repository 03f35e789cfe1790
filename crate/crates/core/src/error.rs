use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("matrix is not Hermitian: max |M - M^dagger| = {max_dev:.3e} exceeds {tol:.1e}")]
    NotHermitian { max_dev: f64, tol: f64 },

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("block structure violation at entry ({row},{col}): magnitude {value:.3e} exceeds {tol:.1e}")]
    StructureViolation {
        row: usize,
        col: usize,
        value: f64,
        tol: f64,
    },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("unknown symmetry unitary `{0}`")]
    UnknownUnitary(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("verdict failed: {0}")]
    Verdict(String),

    #[error("exact derivation step failed: {0}")]
    Derivation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
