use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("near pole: {0}")]
    NearPole(String),
    #[error("ideal not invertible in supplied order")]
    NotInvertible,
    #[error("numerically degenerate orientation (raise precision)")]
    DegenerateOrientation,
    #[error("internal orientation bug: {0}")]
    Orientation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
