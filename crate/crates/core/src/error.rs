use alloc::string::String;

/// Failure modes of the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A kernel was evaluated on its singular set.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative or quadrature procedure missed its tolerance.
    #[error("no convergence: {what} (achieved error {achieved:e})")]
    NoConvergence { what: String, achieved: f64 },

    /// A root search found more than one sign change where one was expected.
    #[error("ambiguous root: {0}")]
    Ambiguous(String),

    /// The request lies outside the configurations this library can evaluate.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn no_convergence(what: impl Into<String>, achieved: f64) -> Self {
        Error::NoConvergence {
            what: what.into(),
            achieved,
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
