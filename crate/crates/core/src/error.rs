use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, QdsmError>;

#[derive(Debug, Error)]
pub enum QdsmError {
    /// An argument lies outside the admissible domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}D, found {found}D")]
    DimensionMismatch { expected: usize, found: usize },

    /// Evaluation at a point where a kernel is singular.
    #[error("singular evaluation: {0}")]
    Singular(String),

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    Solver { iterations: usize, residual: f64 },

    #[error("accuracy target not met: {0}")]
    Accuracy(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A pipeline stage failed; `stage` names it.
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<QdsmError>,
    },
}

impl QdsmError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        QdsmError::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        QdsmError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        QdsmError::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The innermost error, looking through stage wrappers.
    pub fn root(&self) -> &QdsmError {
        match self {
            QdsmError::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit status for the command-line front end: 2 for configuration
    /// problems, 3 for numerical failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            QdsmError::Config(_) => 2,
            QdsmError::Domain(_)
            | QdsmError::DimensionMismatch { .. }
            | QdsmError::Singular(_)
            | QdsmError::Solver { .. }
            | QdsmError::Accuracy(_) => 3,
            _ => 1,
        }
    }
}
