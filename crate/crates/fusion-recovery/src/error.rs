//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A dimension is out of range (e.g. a subspace larger than its ambient space).
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Matrix/vector shapes do not agree.
    #[error("shape error: {0}")]
    Shape(String),

    /// An argument is outside its documented domain.
    #[error("argument error: {0}")]
    Argument(String),

    /// An index is out of range or otherwise invalid.
    #[error("index error: {0}")]
    Index(String),

    /// A matrix that must be full rank is (numerically) singular.
    #[error("singularity error: {0}")]
    Singular(String),

    /// An enumeration or sampling budget would be exceeded.
    #[error("resource error: {0}")]
    Resource(String),

    /// Bad experiment or file configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-parsable code for CLI error lines.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "E_DIMENSION",
            Error::Shape(_) => "E_SHAPE",
            Error::Argument(_) => "E_ARGUMENT",
            Error::Index(_) => "E_INDEX",
            Error::Singular(_) => "E_SINGULAR",
            Error::Resource(_) => "E_RESOURCE",
            Error::Config(_) => "E_CONFIG",
            Error::Io(_) => "E_IO",
            Error::Parse(_) => "E_PARSE",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
