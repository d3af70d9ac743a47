use thiserror::Error;

/// Errors surfaced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the operation's domain (bad probability,
    /// out-of-range vertex, size mismatch, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// An experiment configuration is invalid; the message names the field.
    #[error("config error: {0}")]
    Config(String),
    /// A serialized artifact (edge list, bit lines, config file) failed to parse.
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// An invariant the library guarantees was violated; always a bug.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
