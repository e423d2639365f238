use std::path::PathBuf;

use qcl_core::Error as CoreError;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    /// Invalid configuration.
    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed input file; `line` is 1-based and counts the header.
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: u64, msg: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const MISMATCH: i32 = 2;
    pub const EXTINCTION: i32 = 3;
    pub const USAGE: i32 = 64;
    pub const NUMERICAL: i32 = 70;
    pub const IO: i32 = 74;
}

impl LabError {
    pub fn usage(msg: impl Into<String>) -> Self {
        LabError::Usage(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Usage(_) | LabError::Parse { .. } => exit::USAGE,
            // bad arguments that only the core can judge are still the caller's fault
            LabError::Core(CoreError::Domain(_) | CoreError::Validity { .. } | CoreError::NearField { .. }) => {
                exit::USAGE
            }
            LabError::Core(CoreError::Extinction { .. }) => exit::EXTINCTION,
            LabError::Core(_) => exit::NUMERICAL,
            LabError::Io { .. } | LabError::Json(_) => exit::IO,
        }
    }
}
