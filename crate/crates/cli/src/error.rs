use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const VALIDATION_FAILED: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const NUMERICAL: u8 = 3;
    pub const IO: u8 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure in {module} ({context}): {message}")]
    Numerical {
        module: &'static str,
        context: String,
        message: String,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("validation failed: {}", failed.join(", "))]
    ValidationFailed { failed: Vec<String> },
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self::Config(message.into())
    }

    pub fn numerical(
        module: &'static str,
        context: impl Into<String>,
        err: impl std::fmt::Display,
    ) -> Self {
        Self::Numerical {
            module,
            context: context.into(),
            message: err.to_string(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// Prefixes a config message with its location; other kinds pass through.
    pub fn context(self, location: impl std::fmt::Display) -> Self {
        match self {
            Self::Config(m) => Self::Config(format!("{location}: {m}")),
            other => other,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => exit::CONFIG,
            Self::Numerical { .. } => exit::NUMERICAL,
            Self::Io { .. } => exit::IO,
            Self::ValidationFailed { .. } => exit::VALIDATION_FAILED,
        }
    }
}
