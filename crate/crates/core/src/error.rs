use thiserror::Error;

/// Errors produced by oracles, constructions, and experiments.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MixError {
    #[error("malformed query: expected a {expected}-bit string, got {got} bits")]
    MalformedQuery { expected: u32, got: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("query budget of {budget} exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("promise violated: {0}")]
    PromiseViolation(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{what} exceeds desk-scale limit ({size} > {limit})")]
    TooLarge { what: &'static str, size: u64, limit: u64 },

    #[error("gave up after {attempts} attempts")]
    AttemptsExhausted { attempts: u64 },

    #[error("invalid config: {0}")]
    Config(String),
}

pub type Result<T, E = MixError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> MixError {
    MixError::InvalidArgument(msg.into())
}
