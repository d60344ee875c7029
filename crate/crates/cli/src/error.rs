use std::path::PathBuf;

/// Errors surfaced by the command line front end.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flag, spec string or parameter.
    #[error("configuration error: {0}")]
    Config(String),
    /// Unreadable, unwritable or malformed file.
    #[error("{}: {reason}", path.display())]
    Io {
        /// File involved.
        path: PathBuf,
        /// What went wrong.
        reason: String,
    },
}

impl CliError {
    /// Process exit status: 1 for configuration errors, 2 for I/O errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io { .. } => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, reason: impl ToString) -> Self {
        CliError::Io {
            path: path.into(),
            reason: reason.to_string(),
        }
    }
}

impl From<steffensen_core::Error> for CliError {
    fn from(e: steffensen_core::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, CliError>;
