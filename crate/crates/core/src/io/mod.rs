//! File formats: the versioned scenario document and its overlays, deck and
//! anchor files, assignment runs, performance CSV and run reports.

mod document;
mod report;
mod table;

pub use document::*;
pub use report::*;
pub use table::*;

use thiserror::Error;

use crate::domain::ValidationReport;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("expected schema {expected:?} version {version}, found {found:?} version {found_version}")]
    Schema {
        expected: &'static str,
        version: u32,
        found: String,
        found_version: u32,
    },
    #[error("{path}: {message}")]
    Decode { path: String, message: String },
    #[error("scenario is invalid:\n{0}")]
    Invalid(ValidationReport),
    #[error("csv line {line}: {message}")]
    Csv { line: u64, message: String },
}

impl IoError {
    pub(crate) fn from_json(e: serde_json::Error) -> Self {
        IoError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }

    pub(crate) fn decode(path: impl Into<String>, message: impl Into<String>) -> Self {
        IoError::Decode {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}
