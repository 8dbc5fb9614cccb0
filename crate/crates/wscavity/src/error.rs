use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method did not reach its tolerance.
    #[error("numeric error in {context}: residual {residual:.3e}")]
    Numeric { context: String, residual: f64 },

    /// A parameter combination for which no closed form is implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(context: impl Into<String>, residual: f64) -> Self {
        Error::Numeric {
            context: context.into(),
            residual,
        }
    }
}
