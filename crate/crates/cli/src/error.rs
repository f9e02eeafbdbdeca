use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("cannot write {path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io { .. } => 1,
            Self::Config(_) => 2,
            Self::Numeric(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Io { .. } => "io",
            Self::Config(_) => "config",
            Self::Numeric(_) => "numeric",
        }
    }

    pub fn numeric(e: impl std::fmt::Display) -> Self {
        Self::Numeric(e.to_string())
    }

    pub fn io(path: impl Into<PathBuf>, e: impl std::fmt::Display) -> Self {
        Self::Io { path: path.into(), message: e.to_string() }
    }
}

/// Machine-readable error record.
#[derive(Serialize)]
pub struct ErrorReport<'a> {
    pub schema_version: &'a str,
    pub kind: &'a str,
    pub exit_code: i32,
    pub message: String,
}
