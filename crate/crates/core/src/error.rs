use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input to an operation.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// The requested computation is outside what the chosen method supports.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An enumeration or memory budget would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}
