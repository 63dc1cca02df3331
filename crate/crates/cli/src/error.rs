use std::io;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] tersoff_core::Error),

    #[error("{0}")]
    Usage(String),

    /// One or more verification checks failed; the report has the details.
    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 1 for failed checks or unstable dynamics, 2 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) | CliError::Core(tersoff_core::Error::Numerical(_)) => 1,
            _ => 2,
        }
    }

    /// The reader closed our output, e.g. `tersoff gen ... | head`.
    pub fn is_broken_pipe(&self) -> bool {
        let io = match self {
            CliError::Io(e) | CliError::Core(tersoff_core::Error::Io(e)) => e,
            _ => return false,
        };
        io.kind() == io::ErrorKind::BrokenPipe
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
