use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertical direction: use unit vector (0,1) directly")]
    VerticalDirection,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("size cap exceeded: {0}")]
    Cap(String),
    #[error("condition failed: {0}")]
    Condition(String),
    #[error("float mode cannot separate values closer than 1e-9; rerun in exact mode")]
    NeedExact,
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
