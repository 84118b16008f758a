//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by the toolkit's operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameter fails a stated bound (e.g. `lambda <= 4`, empty grids).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Input violates a documented precondition.
    #[error("precondition error: {0}")]
    Precondition(String),

    /// Evaluation grid too coarse for the coefficient box.
    #[error("aliasing error: grid size {m} < 2N+1 = {need}")]
    Aliasing { m: usize, need: usize },

    /// Majorant vanishes where a ratio against it is required.
    #[error("degenerate majorant: {0}")]
    DegenerateMajorant(String),

    /// Ratio of norms requested for a zero polynomial.
    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    /// Operation does not apply to the given case.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// Dimension or coefficient-box mismatch between operands.
    #[error("box mismatch: {0}")]
    BoxMismatch(String),

    /// Malformed serialized input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
