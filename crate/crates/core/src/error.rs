use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A documented precondition of the moment formula or simulator is violated.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The operation exists only for a restricted class of inputs (e.g. hooks).
    #[error("unsupported input: {0}")]
    Unsupported(String),
    /// The requested value has no exact representation in the chosen scalar.
    #[error("not representable: {0}")]
    NotRepresentable(String),
    /// A numerical guard tripped (non-convergence, loss of ordering, ...).
    #[error("numerical guard: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
