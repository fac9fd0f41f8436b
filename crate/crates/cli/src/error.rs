use strainflow_core::ModelError;
use thiserror::Error;

/// Process exit codes: 0 success/match, 1 validation error, 2 acceptance
/// mismatch, 3 non-convergence.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("config {path}: {msg}")]
    Config { path: String, msg: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("thread pool: {0}")]
    Pool(String),

    #[error("acceptance mismatch: {0}")]
    Mismatch(String),

    #[error("non-convergence: {0}")]
    NonConvergence(String),
}

impl CliError {
    pub fn config(path: impl Into<String>, msg: impl std::fmt::Display) -> Self {
        CliError::Config {
            path: path.into(),
            msg: msg.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Mismatch(_) => 2,
            CliError::NonConvergence(_) => 3,
            _ => 1,
        }
    }
}
