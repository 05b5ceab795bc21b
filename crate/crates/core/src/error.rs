use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(
        "could not place body {body} without overlap after {attempts} attempts \
         (square side {side} cm is too small for this group)"
    )]
    OverDense {
        body: usize,
        attempts: usize,
        side: f64,
    },

    #[error("trajectory needs at least 2 poses, got {0}")]
    ShortTrajectory(usize),

    #[error("cannot judge an empty speed sample")]
    EmptySample,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("mixture probability {0} must lie strictly inside (0, 1)")]
    DegenerateMixture(f64),

    #[error("snapshot {path} does not match the supplied configuration ({reason})")]
    SnapshotMismatch { path: PathBuf, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Runtime(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
