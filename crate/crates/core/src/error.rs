use std::io;

use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a precondition (mismatched spaces, infeasible patterns, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed text input. `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An iterative solver stopped before meeting its tolerance.
    #[error("{solver} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { solver: &'static str, iterations: usize, residual: f64, best_energy: f64, best_vector: Vec<f64> },

    /// A problem is too large for the configured memory ceiling.
    #[error("size guard: {what} needs {required}, limit is {limit}")]
    SizeGuard { what: &'static str, required: u128, limit: u128 },

    /// The state-preparation plan cannot be normalized.
    #[error("plan error: {0}")]
    Plan(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
