use serde_json::json;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] ergo_core::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{failed} of {total} checks failed")]
    VerifyFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Core(e) => e.kind(),
            CliError::Io { .. } => "io",
            CliError::Json { .. } => "json",
            CliError::Invariant(_) => "invariant",
            CliError::VerifyFailed { .. } => "verify_failed",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed { .. } => 1,
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Json { .. } | CliError::Core(_) => 4,
            CliError::Invariant(_) => 5,
        }
    }

    /// The one-line JSON record written to stderr.
    pub fn record(&self) -> String {
        json!({ "error": { "kind": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() } })
            .to_string()
    }
}

pub type CliResult<T> = Result<T, CliError>;
