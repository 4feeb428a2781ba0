use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has {found} entries, expected {expected}")]
    BadLength { expected: usize, found: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("matrix is not positive semi-definite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "post-selection probability {n_m:e} is below threshold; the conditional state diverges"
    )]
    NearZeroPostSelection { n_m: f64 },

    #[error("Fock truncation inadequate: {0}")]
    TruncationInadequate(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("root solve did not converge: {0}")]
    RootSolveFailed(String),

    #[error("cross-check failed for {what}: gap {gap:e}")]
    CrossCheck { what: &'static str, gap: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
