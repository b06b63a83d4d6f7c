use std::path::PathBuf;

use thiserror::Error;
use zenn::ZennError;

/// Command failure, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// The experiment description is unusable. Exit code 1.
    #[error("config error: {0}")]
    Config(String),
    /// The experiment started but could not finish. Exit code 2.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        CliError::Runtime(format!("{}: {err}", path.display()))
    }

    pub fn missing_file(path: PathBuf) -> Self {
        CliError::Config(format!("file not found: {}", path.display()))
    }
}

/// Bad parameter values are configuration mistakes even when the library
/// is the one to notice; everything else happened while running.
impl From<ZennError> for CliError {
    fn from(e: ZennError) -> Self {
        match e {
            ZennError::InvalidParameter(_) | ZennError::ModelDims(_) => CliError::Config(e.to_string()),
            ZennError::Diverged { epoch } => CliError::Runtime(format!("training diverged at epoch {epoch}")),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
