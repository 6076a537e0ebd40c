use std::io;
use std::path::PathBuf;

use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Model {
        context: String,
        source: ehsim_core::Error,
    },
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("trace format: {0}")]
    Trace(String),
    #[error("network: {0}")]
    Net(String),
    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn model(context: impl Into<String>) -> impl FnOnce(ehsim_core::Error) -> Error {
        let context = context.into();
        move |source| Error::Model { context, source }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }

    /// Stable identifier for scripts.
    pub fn kind(&self) -> String {
        match self {
            Error::Config(ConfigError::Read { .. }) => "config.read".into(),
            Error::Config(ConfigError::Parse { .. }) => "config.parse".into(),
            Error::Config(ConfigError::Invalid { .. }) => "config.invalid".into(),
            Error::Model { source, .. } => format!("model.{}", source.kind()),
            Error::UnknownExperiment(_) => "unknown_experiment".into(),
            Error::Io { .. } => "io".into(),
            Error::Csv(_) => "csv".into(),
            Error::Trace(_) => "trace".into(),
            Error::Net(_) => "net".into(),
            Error::Usage(_) => "usage".into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::UnknownExperiment(_) | Error::Usage(_) => 2,
            _ => 1,
        }
    }

    /// One-line JSON description.
    pub fn to_json_line(&self) -> String {
        let mut v = json!({
            "status": "error",
            "kind": self.kind(),
            "message": self.to_string(),
        });
        match self {
            Error::Config(ConfigError::Parse { line, column, .. }) => {
                v["line"] = json!(line);
                v["column"] = json!(column);
            }
            Error::Config(ConfigError::Invalid { field, .. }) => v["field"] = json!(field),
            _ => {}
        }
        v.to_string()
    }
}
