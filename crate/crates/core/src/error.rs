//! Error type shared by all subsystems.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FilterlabError {
    /// Blocking boundaries not strictly increasing, or pieces fail to
    /// partition the ground set.
    #[error("invalid blocking: {0}")]
    InvalidBlocking(String),

    /// A base chain that is not decreasing on the sampled indices.
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    /// Trace over a set whose stationarity is refuted.
    #[error("invalid trace: {0}")]
    InvalidTrace(String),

    /// Malformed or out-of-contract argument.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A construction precondition failed; carries the first offending
    /// index when one exists.
    #[error("precondition violated: {reason}{}", match .index { Some(i) => format!(" (index {i})"), None => String::new() })]
    Precondition { reason: String, index: Option<u64> },

    /// JSON that does not match the documented encodings.
    #[error("malformed definition: {0}")]
    Malformed(String),
}

impl FilterlabError {
    pub fn precondition(reason: impl Into<String>, index: Option<u64>) -> Self {
        FilterlabError::Precondition {
            reason: reason.into(),
            index,
        }
    }
}
