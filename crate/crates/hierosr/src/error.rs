use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by hierarchy construction, model fitting, classification,
/// metric evaluation and file IO.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    /// No constraint-respecting merge is possible and relaxation is disabled.
    #[error("constraint deadlock: {0}")]
    ConstraintDeadlock(String),

    /// A per-sample failure inside a batch operation, tagged with the sample id.
    #[error("sample {sample_id}: {source}")]
    Sample {
        sample_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { expected: u32, found: u32 },

    /// A loaded or constructed hierarchy violates structural invariants.
    #[error("invalid hierarchy: {}", .0.join("; "))]
    InvalidHierarchy(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid_argument(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn invalid_state(msg: impl Into<String>) -> Self {
        Error::InvalidState(msg.into())
    }

    /// Wrap an error with the id of the sample that triggered it.
    pub(crate) fn for_sample(sample_id: &str, source: Error) -> Self {
        Error::Sample {
            sample_id: sample_id.to_string(),
            source: Box::new(source),
        }
    }
}
