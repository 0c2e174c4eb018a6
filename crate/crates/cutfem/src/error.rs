use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),

    #[error("unknown case `{name}` (available: {})", cutfem_core::cases::CASE_NAMES.join(", "))]
    UnknownCase { name: String },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Numerical(#[from] cutfem_core::Error),

    #[error("case `{case}` failed validation: {message}")]
    Validation { case: String, message: String },

    #[error("{0}")]
    Failed(String),
}

impl AppError {
    /// 2 for usage and input errors, 1 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Usage(_)
            | AppError::UnknownCase { .. }
            | AppError::Config { .. }
            | AppError::Io { .. }
            | AppError::Parse { .. } => 2,
            AppError::Numerical(_) | AppError::Validation { .. } | AppError::Failed(_) => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type AppResult<T> = std::result::Result<T, AppError>;
