//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a precondition (shape, domain, parameter range).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A row label was looked up that the graph does not contain.
    #[error("unknown label: {0:?}")]
    UnknownLabel(String),

    /// Two graphs that must share a node set do not.
    #[error("label mismatch: {0}")]
    LabelMismatch(String),

    /// A file could not be parsed; location is 1-based.
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// The maximum-entropy margin fit did not reach tolerance.
    #[error(
        "polytope solver did not converge after {iterations} iterations \
         (margin residual {residual:.3e}, tolerance {tolerance:.3e})"
    )]
    NoConvergence {
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
