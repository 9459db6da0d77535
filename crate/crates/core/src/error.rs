use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// Positive and negative parts of an integral both diverge.
    #[error("integral is not integrable: {0}")]
    NonIntegrable(String),

    #[error("upper variance is infinite: truncated second moment still moving ({last_value}) at c = {last_c}")]
    InfiniteUpperVariance { last_value: f64, last_c: f64 },

    #[error("transform {transform} is not supported for parametric member {member}")]
    UnsupportedTransform { transform: String, member: usize },

    /// Tail index sits exactly on the finiteness boundary of the moment.
    #[error("boundary case, undecided: {0}")]
    BoundaryUndecided(String),

    #[error("truncated mean did not converge: {0}")]
    NotConverged(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
