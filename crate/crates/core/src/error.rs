use thiserror::Error;

/// Errors raised by the library and mapped onto CLI exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A combinatorial enumeration would exceed the configured work budget.
    #[error("resource budget exceeded: {what} needs {needed} steps, budget is {budget}")]
    Budget {
        what: String,
        needed: u128,
        budget: u128,
    },

    /// Exact and floating-point values were mixed, or an exact-only routine got a float cost.
    #[error("numeric mode error: {0}")]
    Mode(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Process exit code for this error (1 = invalid input, 2 = resource refusal).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
