use thiserror::Error;

/// Process exit codes.
pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("self-check failed: {0}")]
    SelfcheckFailed(String),

    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),

    #[error("cannot serialise output: {0}")]
    Serialise(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::Numerical(_) | CliError::SelfcheckFailed(_) | CliError::Serialise(_) => EXIT_NUMERICAL,
        }
    }

    /// Maps a library error raised at one grid point.
    pub fn at_point(err: pairgf::Error, context: impl std::fmt::Display) -> Self {
        match err {
            pairgf::Error::InvalidInput(_) | pairgf::Error::CutoffRequired => {
                CliError::Config(format!("{context}: {err}"))
            }
            _ => CliError::Numerical(format!("{context}: {err}")),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError::Serialise(err.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Serialise(err.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
