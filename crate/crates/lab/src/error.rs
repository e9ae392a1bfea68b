use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("cannot read config {path}: {source}")]
    ConfigRead { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("malformed CSV {path}: {reason}")]
    MalformedCsv { path: PathBuf, reason: String },
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] monolab_core::Error),
    #[error("{failed} rows did not converge (budget {budget})")]
    RowBudget { failed: usize, budget: usize },
    #[error("acceptance check failed: {0}")]
    Acceptance(String),
}

impl LabError {
    /// Process exit code: 1 acceptance failure, 2 configuration or input
    /// error, 3 too many non-converged rows.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Acceptance(_) => 1,
            LabError::RowBudget { .. } => 3,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> LabError {
        let path = path.into();
        move |source| LabError::Io { path, source }
    }
}
