//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors surfaced by the algebra and verification layers.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// Operands belong to different presentations or base fields.
    #[error("presentation mismatch: {0}")]
    PresentationMismatch(String),

    /// An expression mentions a variable the presentation does not declare.
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    /// The operation needs a finite-rank presentation.
    #[error("unsupported on an infinite-rank presentation: {0}")]
    InfiniteRank(String),

    /// The operation is not defined for the given input.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Nilpotency (or similar) cannot be decided for this element here.
    #[error("undecidable here: {0}")]
    Undecidable(String),

    /// The element has no two-sided inverse.
    #[error("not invertible: {0}")]
    NotInvertible(String),

    /// Input lies outside the operation's stated domain.
    #[error("out of domain: {0}")]
    OutOfDomain(String),

    /// The generator set does not define a numerical semigroup.
    #[error("not a numerical semigroup: {0}")]
    NotNumericalSemigroup(String),

    /// The gluing hypotheses (coprimality and cross-membership) fail.
    #[error("gluing hypothesis violated: {0}")]
    GluingHypothesis(String),

    /// An orbit-map expansion produced a nonzero negative-exponent term.
    #[error("extension violation at d={d}, support exponent s={s}")]
    ExtensionViolation { d: u64, s: i64 },

    /// A configured resource budget (rank, iteration cap) was exceeded.
    #[error("resource budget exceeded: {0}")]
    Resource(String),

    /// An internal consistency assertion failed; indicates a bug.
    #[error("internal consistency failure: {0}")]
    Inconsistency(String),

    /// Malformed textual input.
    #[error("parse error: {0}")]
    Parse(String),

    /// Invalid arguments at the interface level.
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
