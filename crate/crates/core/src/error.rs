use thiserror::Error;

/// Errors produced by the geometry, solver and analysis routines.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    /// Input violates an operation's domain (empty set, out-of-range parameter, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A vector or point set does not have the expected dimension.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The minimum enclosing ball solver ran out of budget.
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        best_center: Vec<f64>,
        best_radius: f64,
    },

    /// An exact (exponential) routine was asked to handle an input above its cap.
    #[error("size cap exceeded: {what} is {actual}, cap is {cap}; use greedy mode")]
    SizeCap {
        what: &'static str,
        actual: usize,
        cap: usize,
    },

    /// A supplied certificate is inconsistent with the point set.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    /// Malformed text input.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
