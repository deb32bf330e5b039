use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed JSON: {0}")]
    Json(String),

    /// Invalid or unknown configuration key.
    #[error("invalid configuration at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("thread pool: {0}")]
    Threads(String),

    #[error(transparent)]
    Core(#[from] nsmx::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Json(_) => "json",
            CliError::Config { .. } => "config",
            CliError::Io { .. } => "io",
            CliError::Csv(_) => "csv",
            CliError::Threads(_) => "threads",
            CliError::Core(_) => "solver",
        }
    }

    pub fn report(&self) -> ErrorReport {
        let path = match self {
            CliError::Config { path, .. } => Some(path.clone()),
            _ => None,
        };
        ErrorReport { schema_version: crate::output::SCHEMA_VERSION, kind: self.kind(), message: self.to_string(), path }
    }
}

/// JSON body written on failure.
#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub schema_version: u32,
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}
