use jetcartan::dconnect::DConnectError;
use jetcartan::geometry::GeometryError;
use jetcartan::identities::IdentityError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Connection(#[from] DConnectError),
    #[error(transparent)]
    Identity(#[from] IdentityError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn config(line: usize, message: impl Into<String>) -> CliError {
        CliError::Config { line, message: message.into() }
    }

    /// 2 for bad input, 3 when sampling could not find usable points, 1 for
    /// anything that went wrong while checking.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Scenario(_) | CliError::Geometry(_) | CliError::Connection(_) => 2,
            CliError::Identity(IdentityError::Domain { .. }) => 3,
            CliError::Identity(IdentityError::InvalidPlan(_)) => 2,
            CliError::Identity(IdentityError::Connection(_)) => 2,
            CliError::Identity(_) => 1,
            CliError::Io { .. } => 2,
        }
    }
}
