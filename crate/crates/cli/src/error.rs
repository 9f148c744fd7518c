use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable input or invalid configuration.
    #[error("{0}")]
    Usage(String),
    /// Failure while computing.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }

    pub fn write(path: &Path, e: std::io::Error) -> Self {
        CliError::Runtime(format!("cannot write {}: {e}", path.display()))
    }
}

impl From<rsgnn::Error> for CliError {
    fn from(e: rsgnn::Error) -> Self {
        if e.is_usage() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Writes `contents` to `path`, creating parent directories.
pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::write(path, e))
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}
