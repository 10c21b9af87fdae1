use num_complex::Complex64;
use thiserror::Error;

use crate::numbers::BiComplex;

/// Idempotent component label used in error reports: 1 or 2, or 0 for a
/// plain complex argument.
pub type Component = u8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("operand lies in the null cone")]
    NullCone,

    #[error("component {component} lies on the branch cut (negative real axis)")]
    BranchCut { component: Component },

    #[error("gamma pole at {at} (component {component})")]
    Pole { component: Component, at: Complex64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("argument outside the convergence region: {0}")]
    Domain(String),

    #[error("series did not converge within {terms} terms")]
    NoConvergence { terms: usize, partial: BiComplex },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("positivity condition fails in component {component} at index {index}")]
    Positivity { component: Component, index: usize },

    #[error("index {0} out of range")]
    Index(usize),

    #[error("truncation cap {0} reached before the tail target")]
    Truncation(usize),

    #[error("parameter lists differ")]
    ParamMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;
