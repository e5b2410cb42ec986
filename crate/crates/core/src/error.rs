use thiserror::Error;

/// Errors raised by the operator laboratory.
///
/// Variant messages start with a stable tag so that front ends (and scripts
/// grepping their output) can tell failures apart.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("InvalidParams: {0}")]
    InvalidParams(String),

    #[error("DegenerateParams: p and q coincide within {threshold:e} (p = {p}, q = {q})")]
    DegenerateParams { p: f64, q: f64, threshold: f64 },

    #[error("MissingTable: custom structure function has no value for level {level}")]
    MissingTable { level: i64 },

    #[error("UnphysicalDSF: structure function value {value} at level {level} is not admissible")]
    UnphysicalDsf { level: usize, value: f64 },

    #[error("ExponentOverflow: |exponent * ln Q| = {magnitude:.3} exceeds {limit}")]
    ExponentOverflow { magnitude: f64, limit: f64 },

    #[error("LengthMismatch: expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("MarginTooLarge: margin {margin} leaves no interior block in dimension {dim}")]
    MarginTooLarge { margin: usize, dim: usize },

    #[error("MissingHamiltonian: mu = {mu} requires a Hamiltonian matrix")]
    MissingHamiltonian { mu: f64 },

    #[error("DegenerateFit: {0}")]
    DegenerateFit(String),

    #[error("NonlinearEtaA: eta_a exponent has quadratic coefficient {c2}")]
    NonlinearEtaA { c2: String },

    #[error("InsufficientFRange: F has no value at level {level}")]
    InsufficientFRange { level: i64 },

    #[error("WrongKind: {form} requires the nonstandard (p,q) structure function, got {kind}")]
    WrongKind { form: String, kind: String },

    #[error("Parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
