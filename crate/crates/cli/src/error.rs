use thiserror::Error;

pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] relloc::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("run record: {0}")]
    Record(#[from] serde_json::Error),
    #[error("replay of {0} did not reproduce the recorded results")]
    ReplayMismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Invalid(_) => EXIT_VALIDATION,
            CliError::Core(e) => match e {
                relloc::Error::InvalidDimension(_)
                | relloc::Error::InvalidParameter(_)
                | relloc::Error::InvalidGrid(_) => EXIT_VALIDATION,
                _ => EXIT_RUNTIME,
            },
            CliError::Io { .. } | CliError::Record(_) | CliError::ReplayMismatch(_) => EXIT_RUNTIME,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
