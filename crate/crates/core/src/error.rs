use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library. Every variant carries enough context to
/// print a one-line diagnostic.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid range [{lo}, {hi}): {reason}")]
    InvalidRange { lo: u64, hi: u64, reason: &'static str },

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("residue {a} is not coprime to modulus {q}")]
    NotCoprime { q: u64, a: u64 },

    #[error("Ei is singular at z = 0")]
    EiSingular,

    #[error("zero table {source_name}: line {line}: cannot parse `{text}`")]
    ZeroParse { source_name: String, line: usize, text: String },

    #[error("zero table {source_name}: line {line}: ordinate {value} does not exceed previous {previous}")]
    ZeroOrdering { source_name: String, line: usize, value: f64, previous: f64 },

    #[error("zero table {source_name}: line {line}: ordinate {value} is outside (14, {max_height})")]
    ZeroOutOfBounds { source_name: String, line: usize, value: f64, max_height: f64 },

    #[error("zero table {source_name}: ordinate #{index} is {value}, expected {expected} within 1e-4")]
    ZeroMismatch { source_name: String, index: usize, value: f64, expected: f64 },

    #[error("zero table {source_name} is empty")]
    ZeroEmpty { source_name: String },

    #[error("height T = {t} exceeds the table height {height}")]
    HeightBeyondTable { t: f64, height: f64 },

    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> LabError {
    LabError::InvalidArgument { name, reason: reason.into() }
}
