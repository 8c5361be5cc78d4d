use std::path::PathBuf;

use thiserror::Error;

use crate::model::ModelCheckpoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("degenerate component embedding (zero norm)")]
    DegenerateEmbedding,

    #[error("SMILES parse error at byte {offset}: {message}")]
    Smiles { offset: usize, message: String },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("missing descriptors for {} component(s): {}", .0.len(), .0.join(", "))]
    MissingDescriptors(Vec<String>),

    #[error("non-finite gradient for parameter {param} at step {step}")]
    NonFiniteGradient { param: usize, step: u64 },

    #[error("training diverged at epoch {epoch} (validation loss is not finite)")]
    Diverged {
        epoch: usize,
        last_good: Box<ModelCheckpoint>,
    },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl AsRef<std::path::Path>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.as_ref().display().to_string(),
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by the filesystem rather than by content.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
