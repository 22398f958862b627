use thiserror::Error;

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status for failed suites, false predicates and unconverged solves.
pub const EXIT_FAILED: i32 = 1;
/// Exit status for invalid input.
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("unknown suite '{0}' (see `realpos verify --list`)")]
    UnknownSuite(String),

    #[error(transparent)]
    Core(#[from] realpos::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(realpos::Error::NoConvergence(_)) => EXIT_FAILED,
            CliError::Io(_) => EXIT_FAILED,
            _ => EXIT_INVALID,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
