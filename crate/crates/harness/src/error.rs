use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    #[error("invalid config key `{key}`: {msg}")]
    Config { key: String, msg: String },
    #[error("unknown preset `{0}` (try `list-presets`)")]
    UnknownPreset(String),
    #[error("infeasible benchmark `{benchmark}`: {msg}")]
    Infeasible { benchmark: &'static str, msg: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] aci_core::AciError),
}

impl HarnessError {
    pub fn config(key: &str, msg: impl Into<String>) -> Self {
        HarnessError::Config { key: key.to_string(), msg: msg.into() }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.display().to_string(), source }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
