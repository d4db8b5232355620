use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure reported by an external service client (translation, embedding,
/// classification).
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{service} client error: {message}")]
pub struct ClientError {
    pub service: &'static str,
    pub message: String,
    /// Transport and 5xx failures are worth retrying; malformed responses are not.
    pub retriable: bool,
}

impl ClientError {
    pub fn retriable(service: &'static str, message: impl Into<String>) -> Self {
        Self { service, message: message.into(), retriable: true }
    }

    pub fn fatal(service: &'static str, message: impl Into<String>) -> Self {
        Self { service, message: message.into(), retriable: false }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("line {line}: field `{field}`: {message}")]
    Record { line: usize, field: String, message: String },

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("invalid {what}: {message}")]
    Invalid { what: &'static str, message: String },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("cosine undefined for an all-zero vector")]
    ZeroVector,

    #[error("no vector for key `{0}`")]
    MissingVector(String),

    #[error(transparent)]
    Client(#[from] ClientError),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("dangling edge endpoints: {}", .0.join(", "))]
    DanglingEndpoints(Vec<String>),

    #[error("unsupported format version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error(transparent)]
    Edit(#[from] crate::edit::EditError),
}

impl Error {
    pub(crate) fn record(line: usize, field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Record { line, field: field.into(), message: message.into() }
    }

    pub(crate) fn invalid(what: &'static str, message: impl Into<String>) -> Self {
        Error::Invalid { what, message: message.into() }
    }

    /// True when the underlying cause is a retriable client failure.
    pub fn is_retriable(&self) -> bool {
        matches!(self, Error::Client(c) if c.retriable)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Syntax { line: e.line(), message: e.to_string() }
    }
}
