//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Structural problem in tabular input (ragged rows, empty column set).
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    /// A cell that should be numeric is not.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Too few (or too many) elements for the operation.
    #[error("size error: {0}")]
    Size(String),

    /// Mismatched matrix/vector dimensions between arguments.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration value.
    #[error("configuration error: {0}")]
    Config(String),

    /// The requested metric is undefined for this input.
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// Instance exceeds a hard safety bound (brute-force enumeration).
    #[error("instance too large: {0}")]
    TooLarge(String),

    /// A stage of the recursive pipeline failed at the given iteration.
    #[error("iteration {iteration}: {source}")]
    Pipeline {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Attach a pipeline iteration index to an error from an inner stage.
    pub fn at_iteration(self, iteration: usize) -> Self {
        Error::Pipeline {
            iteration,
            source: Box::new(self),
        }
    }
}
