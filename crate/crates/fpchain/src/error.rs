use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] fpchain_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("no rows to write (pass allow_empty to write a header-only file)")]
    EmptyReport,
}

impl HarnessError {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            _ => 1,
        }
    }
}
