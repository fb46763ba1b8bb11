use thiserror::Error;

/// Errors raised by the bound evaluators and analytic routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable `{0}` appears more than once")]
    DuplicateVariable(String),

    #[error("variable set is empty")]
    EmptyVariableSet,

    #[error("variable sets overlap on `{0}`")]
    OverlappingSets(String),

    #[error("probabilities sum to {sum}, expected 1 (tolerance 1e-9)")]
    NotNormalized { sum: f64 },

    #[error("invalid probability {value} at index {index}")]
    InvalidProbability { index: usize, value: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Markov condition `{condition}` violated (residual {residual:.3e} nats)")]
    MarkovViolation { condition: String, residual: f64 },

    #[error("set function is not supermodular on ({a}, {b}): gap {gap:.3e}")]
    NotSupermodular { a: String, b: String, gap: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
