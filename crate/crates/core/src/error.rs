use thiserror::Error;

/// Errors for quantum-state and information-theoretic computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositiveSemidefinite(f64),

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid subsystem index {index} (state has {count} subsystems)")]
    InvalidSubsystem { index: usize, count: usize },

    #[error("instrument is not complete (max deviation from identity {0:.3e})")]
    IncompleteInstrument(f64),

    #[error("dimension {0} exceeds supported maximum {1}")]
    DimensionTooLarge(usize, usize),

    #[error("bound violated: {0}")]
    BoundViolation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("malformed JSON object: {0}")]
    MalformedJson(String),
}

pub type Result<T> = std::result::Result<T, Error>;
