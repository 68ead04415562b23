use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{0}")]
    Failed(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 0 success, 1 other failure, 2 validation, 3 budget, 4 parse.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 4,
            CliError::Validation(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Failed(_) | CliError::Io { .. } => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
