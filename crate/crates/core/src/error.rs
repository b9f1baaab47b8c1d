use thiserror::Error;

/// Errors raised while building or operating on representations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("inadmissible root of unity (k={k}, l={l}): {reason}")]
    Inadmissible { k: u32, l: u32, reason: String },

    #[error("module needs at least one mode (m={m}, n={n})")]
    EmptyModule { m: usize, n: usize },

    #[error("division by exact zero")]
    DivisionByZero,

    #[error("scalar is not real (differs from its conjugate)")]
    NotReal,

    #[error("sign certification did not converge within {bits} bits")]
    SignNotCertified { bits: u32 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("graded bracket needs a parity on both operands")]
    MissingParity,

    #[error("occupation vector {occupation:?} outside module bounds")]
    OutOfBounds { occupation: Vec<u32> },

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("generator {generator} leaks vector {column} outside the declared subspace")]
    SubspaceLeak { generator: usize, column: usize },

    #[error("pivot {pivot:e} falls inside the ambiguous band; rank decision aborted")]
    PrecisionWarning { pivot: f64 },

    #[error("cartan matrix needs size >= {min}, got {got}")]
    CartanSize { min: usize, got: usize },

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
