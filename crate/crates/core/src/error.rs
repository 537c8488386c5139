use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("partition violation: entity `{entity}` appears in clusters `{first}` and `{second}`")]
    PartitionViolation {
        entity: String,
        first: String,
        second: String,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("no entities found under {0}")]
    EmptySystem(PathBuf),

    #[error("system too large: {entities} entities exceeds the configured cap of {cap}")]
    SystemTooLarge { entities: usize, cap: usize },

    #[error("architectures cover different entity sets ({only_left} only in the first, {only_right} only in the second); use a2a for evolving systems")]
    UniverseMismatch { only_left: usize, only_right: usize },

    #[error("undefined input: {0}")]
    UndefinedInput(String),

    #[error("invalid scripted change: {0}")]
    ScriptedChange(String),

    #[error("run {run} failed: {source}")]
    Trial {
        run: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::PartitionViolation { .. } => "partition-violation",
            Error::InvalidModel(_) => "invalid-model",
            Error::Config(_) => "config",
            Error::EmptySystem(_) => "empty-system",
            Error::SystemTooLarge { .. } => "system-too-large",
            Error::UniverseMismatch { .. } => "universe-mismatch",
            Error::UndefinedInput(_) => "undefined-input",
            Error::ScriptedChange(_) => "scripted-change",
            Error::Trial { .. } => "trial",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
