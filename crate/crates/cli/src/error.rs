use std::process::ExitCode;

use encoder_lens_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    UnknownId(String),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error("{0}")]
    Engine(String),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }

    /// 2 bad flags, 3 unknown catalog id, 4 environment, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::UnknownId(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Engine(_) => 1,
        }
    }
}

impl From<CliError> for ExitCode {
    fn from(e: CliError) -> Self {
        ExitCode::from(e.exit_code())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NotFound { .. } => CliError::UnknownId(e.to_string()),
            CoreError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            other => CliError::Engine(other.to_string()),
        }
    }
}
