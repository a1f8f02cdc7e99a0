//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Two inputs that must share a shape do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A dimension that must be at least 1 is zero.
    #[error("{0} must be at least 1")]
    EmptyDimension(&'static str),

    /// A numeric value fell outside its documented range.
    #[error("value out of range: {0}")]
    OutOfRange(String),

    /// The policy gives some agent zero expected reward, so the log
    /// gradient is undefined.
    #[error("agent {agent} has zero expected reward under the policy")]
    ZeroExpectedReward { agent: usize },

    /// A per-arm statistic was requested before the arm was ever pulled.
    #[error("arm {arm} has no pulls")]
    ZeroCount { arm: usize },

    /// Arm index outside `0..n_arms`.
    #[error("arm index {arm} out of range for {n_arms} arms")]
    ArmOutOfRange { arm: usize, n_arms: usize },

    /// The simplex/half-space intersection is empty.
    #[error("simplex/half-space intersection is empty")]
    InfeasibleConstraint,

    /// An optimizer objective evaluated to NaN or infinity.
    #[error("objective became non-finite")]
    NonFiniteObjective,

    /// The requested lattice would exceed the oracle's size limit.
    #[error("grid of {points} points exceeds limit {limit}")]
    GridTooLarge { points: u64, limit: u64 },

    /// A configuration field failed validation.
    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    /// A persisted file could not be parsed.
    #[error("parse error in {path}: {reason}")]
    Parse { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
