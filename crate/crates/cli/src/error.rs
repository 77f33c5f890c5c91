use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Exit status of a finished run whose report is not OK (a FAIL certificate or a failed check).
pub const EXIT_FAIL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] rlab_core::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("reports are not comparable: {0}")]
    SchemaMismatch(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 1 for caller mistakes, 2 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if !e.is_validation() => 2,
            CliError::Csv(_) => 2,
            _ => 1,
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
