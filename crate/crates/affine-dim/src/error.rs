use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is singular (|det| = {det:e})")]
    SingularMatrix { det: f64 },

    #[error("matrix {index} is not a contraction (largest singular value {norm})")]
    NonContracting { index: usize, norm: f64 },

    #[error("system is empty")]
    EmptySystem,

    #[error("word symbol {symbol} out of range 1..={n_symbols}")]
    SymbolOutOfRange { symbol: u8, n_symbols: usize },

    #[error("empty word not allowed here")]
    EmptyWord,

    #[error("enumeration budget exceeded: need {required} words, budget {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("exponent s must be nonnegative, got {s}")]
    NegativeExponent { s: f64 },

    #[error("no invariant cone certificate: {reason}")]
    NoCertificate { reason: String },

    #[error("power iteration did not converge within {iterations} iterations")]
    PowerIterationDiverged { iterations: u64 },

    #[error("no domination gap: chi_ss == chi_s == {chi:e}")]
    NoDominationGap { chi: f64 },

    #[error("matrix {index} is not sign-definite (entries must be all positive or all negative)")]
    SignIndefinite { index: usize },

    #[error("box-count resolution insufficient: point error radius {error_radius:e} exceeds smallest scale {scale:e}; increase cloud depth to at least {required_depth}")]
    InsufficientResolution {
        error_radius: f64,
        scale: f64,
        required_depth: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("system spec: {0}")]
    SpecFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
