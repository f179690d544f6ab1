use std::io;

use thiserror::Error;

use crate::partition::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric or structural argument is outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A node or time lies outside the node set or time domain.
    #[error("out of domain: {0}")]
    Domain(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(ValidationReport),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("generation failed: {0}")]
    Generation(String),

    /// Malformed input file. `line` is 1-based; 0 when the format has no line structure.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    /// True for failures caused by bad user input rather than the environment.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}
