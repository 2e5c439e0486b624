use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },

    #[error("duplicate record for agent {agent_id} at frame {frame}")]
    DuplicateRecord { frame: i64, agent_id: i64 },

    #[error("shape mismatch in {context}: expected {expected}, got {actual}")]
    Shape {
        context: String,
        expected: String,
        actual: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("missing prediction cell: sequence {sequence_id}, sample {sample}, agent {agent_id}, t={t}")]
    MissingCell {
        sequence_id: String,
        sample: usize,
        agent_id: i64,
        t: usize,
    },

    #[error("unknown sequence id {0}")]
    UnknownSequence(String),

    #[error("no predictions for sequence {0}")]
    MissingPrediction(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("training diverged at step {step}: loss = {loss}")]
    Diverged { step: usize, loss: f64 },
}

impl Error {
    pub(crate) fn shape(context: impl Into<String>, expected: impl ToString, actual: impl ToString) -> Self {
        Error::Shape {
            context: context.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
