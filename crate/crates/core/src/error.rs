use thiserror::Error;

/// Errors raised by the algebraic and geometric kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {message} (offending eigenvalue {eigenvalue})")]
    Range { message: String, eigenvalue: String },

    #[error("invalid group table: {0}")]
    InvalidTable(String),

    #[error("composition error: source {source_value} does not match target {target_value}")]
    Composition {
        source_value: String,
        target_value: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("budget exceeded: search space has {size} assignments, budget is {budget}")]
    Budget { size: u128, budget: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
