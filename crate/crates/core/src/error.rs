//! Crate-wide error type.

use alloc::string::String;
use thiserror::Error;

/// Errors produced by model evaluation and the numerical solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Evaluation outside the admissible region (zero denominator, negative
    /// base under a fractional power, non-finite result).
    #[error("domain error: {0}")]
    Domain(String),

    /// Missing, malformed or out-of-range parameter.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An iterative solver failed to converge.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// A root/eigenvalue bracket could not be established.
    #[error("bracket not found: {0}")]
    Bracket(String),

    /// Input violates a structural hypothesis of the requested analysis.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// Mismatched array lengths, empty input and similar shape problems.
    #[error("shape error: {0}")]
    Shape(String),
}

pub type Result<T> = core::result::Result<T, Error>;
