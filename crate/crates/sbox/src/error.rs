//! Errors of the command line and result files.

use std::path::PathBuf;

use sbox_core::ConfigError;
use thiserror::Error;

/// Anything that can stop a command.
#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration value.
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// Unknown registry key, with the closest valid one.
    #[error("unknown {kind} `{key}`; did you mean `{suggestion}`? valid: {valid}")]
    UnknownKey {
        /// What kind of key.
        kind: &'static str,
        /// Offending key.
        key: String,
        /// Nearest valid key.
        suggestion: String,
        /// Comma-separated valid keys.
        valid: String,
    },
    /// File-system failure.
    #[error("{path}: {source}")]
    Io {
        /// File involved.
        path: PathBuf,
        /// Cause.
        source: std::io::Error,
    },
    /// Malformed TOML configuration.
    #[error("{path}: {source}")]
    Toml {
        /// File involved.
        path: PathBuf,
        /// Cause.
        source: toml::de::Error,
    },
    /// Malformed JSON.
    #[error("{path}: {source}")]
    Json {
        /// File involved.
        path: PathBuf,
        /// Cause.
        source: serde_json::Error,
    },
    /// Malformed CSV.
    #[error("{path}: {source}")]
    Csv {
        /// File involved.
        path: PathBuf,
        /// Cause.
        source: csv::Error,
    },
    /// Stored results are inconsistent with their manifest.
    #[error("{0}")]
    Results(String),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>) -> impl FnOnce(csv::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Csv { path, source }
    }

    pub(crate) fn json(path: impl Into<PathBuf>) -> impl FnOnce(serde_json::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Json { path, source }
    }
}
