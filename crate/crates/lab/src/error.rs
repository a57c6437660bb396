use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("cannot parse config: {0}")]
    ConfigParse(#[source] serde_json::Error),
    #[error("invalid config:\n  - {}", .0.join("\n  - "))]
    InvalidConfig(Vec<String>),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("a record already exists at {}; records are never overwritten", .0.display())]
    RecordExists(PathBuf),
    #[error("malformed record {}: {reason}", path.display())]
    BadRecord { path: PathBuf, reason: String },
    #[error(transparent)]
    Core(#[from] comic_core::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

impl LabError {
    /// 2 for configuration problems, 1 for everything that fails at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::ConfigParse(_) | LabError::InvalidConfig(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| LabError::Io { path, source }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
