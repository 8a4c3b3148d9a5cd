use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The data does not describe a valid function in the representation class.
    #[error("invalid function: {0}")]
    InvalidFunction(String),

    /// The function is valid but not an admissible profile (negative values,
    /// non-zero tails, bad dimension).
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    /// An operation was called outside its precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The input is well formed but outside what the engine can compute exactly.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Numeric oracles only accept sets without Cantor pieces.
    #[error("Cantor piece present: {0}")]
    CantorPresent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
