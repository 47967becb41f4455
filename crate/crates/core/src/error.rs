use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value outside the validated range of a correlation or formula.
    #[error("{quantity} = {value} outside valid range [{min}, {max}]")]
    Range {
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// Malformed or missing atomic data.
    #[error("atomic data error in record `{record}`: {message}")]
    Data { record: String, message: String },

    /// Invalid run configuration. `line` is 1-based when the error came from a file.
    #[error("{}", fmt_config(.line, .key, .message))]
    Config {
        line: Option<usize>,
        key: Option<String>,
        message: String,
    },

    #[error("coupling calibration failed: {0}")]
    Calibration(String),

    #[error("ensemble failed: {discarded} of {total} trajectories diverged")]
    Divergence { discarded: usize, total: usize },

    #[error("no usable trajectories: {0}")]
    EmptyEnsemble(String),

    #[error("plot input {path}: {message}")]
    PlotInput { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn fmt_config(line: &Option<usize>, key: &Option<String>, message: &str) -> String {
    match (line, key) {
        (Some(l), Some(k)) => format!("config line {l}: `{k}`: {message}"),
        (Some(l), None) => format!("config line {l}: {message}"),
        (None, Some(k)) => format!("config `{k}`: {message}"),
        (None, None) => format!("config: {message}"),
    }
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            line: None,
            key: Some(key.into()),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Divergence { .. } | Error::EmptyEnsemble(_) => 2,
            Error::Io { .. } => 3,
            Error::PlotInput { .. } => 4,
            _ => 1,
        }
    }
}
