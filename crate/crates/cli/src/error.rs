use std::fmt;

use crate::scenario::Origin;

/// A scenario that could not be read.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub origin: Option<Origin>,
    pub key: Option<String>,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(origin: Origin, key: Option<&str>, message: impl Into<String>) -> Self {
        Self::at(Some(origin), key.unwrap_or_default(), message)
    }

    pub(crate) fn at(origin: Option<Origin>, key: &str, message: impl Into<String>) -> Self {
        Self {
            origin,
            key: (!key.is_empty()).then(|| key.to_string()),
            message: message.into(),
        }
    }

    pub(crate) fn missing(key: &str) -> Self {
        Self {
            origin: None,
            key: None,
            message: format!("missing required key '{key}'"),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(origin) = self.origin {
            write!(f, "{origin}: ")?;
        }
        if let Some(key) = &self.key {
            write!(f, "key '{key}': ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{0}")]
    Runtime(String),
}

impl Error {
    /// Process exit status: 2 for configuration problems, 3 for runtime ones.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Parse(_) | Error::Config(_) => 2,
            Error::Runtime(_) => 3,
        }
    }
}

impl From<eraser_core::Error> for Error {
    fn from(e: eraser_core::Error) -> Self {
        use eraser_core::Error as E;
        match e {
            E::InvalidArgument(_) | E::InsufficientData(_) => Error::Config(e.to_string()),
            E::EmptyState => Error::Runtime("polarizer annihilates both branches".into()),
            _ => Error::Runtime(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
