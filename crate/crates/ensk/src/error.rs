use std::path::PathBuf;

use ensk_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl AppError {
    pub fn input(msg: impl Into<String>) -> Self {
        AppError::Input(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }

    /// 0 ok, 2 input error, 3 infeasible, 4 size guard.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Core(CoreError::NoFeasibleSubset) => 3,
            AppError::Core(CoreError::TooLarge { .. }) => 4,
            _ => 2,
        }
    }
}
