use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] gomea_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("malformed statistics file: {0}")]
    Format(String),
}

impl CliError {
    /// Whether this error stems from invalid user input rather than from
    /// the run itself.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            CliError::Core(gomea_core::Error::Config(_) | gomea_core::Error::Parse { .. })
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
