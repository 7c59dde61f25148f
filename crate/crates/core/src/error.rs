use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidArgument(String),
    /// Point lies in (or too close to) the filled Julia set for the requested operation.
    Domain(String),
    /// Branch tracking could not be resolved at the current step size.
    StepRefinementNeeded(String),
    /// Finite computation could neither certify escape nor boundedness.
    Undecided(String),
    ResourceLimit(String),
    /// Iterative solver ran out of budget; partial results may be attached elsewhere.
    NonConvergence(String),
    /// Continuation broke down; the message carries the trace of the last good steps.
    ContinuationFailed(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(m) => write!(f, "invalid argument: {m}"),
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::StepRefinementNeeded(m) => write!(f, "step refinement needed: {m}"),
            Error::Undecided(m) => write!(f, "undecided: {m}"),
            Error::ResourceLimit(m) => write!(f, "resource limit: {m}"),
            Error::NonConvergence(m) => write!(f, "no convergence: {m}"),
            Error::ContinuationFailed(m) => write!(f, "continuation failed: {m}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
