//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
    #[error("unknown schema_version {found:?} (expected {expected:?})")]
    Schema { found: String, expected: String },
    #[error("validation failed ({subject}): {invariant}")]
    Validation { subject: String, invariant: String },
}

impl DataError {
    pub fn validation(subject: impl Into<String>, invariant: impl Into<String>) -> Self {
        DataError::Validation { subject: subject.into(), invariant: invariant.into() }
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulator config: field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("placement failed after {attempts} rejected samples; region too small")]
    Placement { attempts: usize },
}

impl SimError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        SimError::Config { field: field.into(), message: message.into() }
    }
}

#[derive(Debug, Error)]
#[error("trajectory has no samples")]
pub struct EmptyTrajectory;
