use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Core(#[from] cvbdm::Error),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("data for the {example} example is unavailable: expected {path}; source: {source_note}")]
    DataUnavailable {
        example: &'static str,
        path: PathBuf,
        source_note: &'static str,
    },

    #[error("malformed input {path}: {message}")]
    Malformed { path: PathBuf, message: String },

    #[error("grid file: {0}")]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
