use thiserror::Error;

/// CLI failure classes, mapped onto exit codes:
/// 1 invalid input, 2 computation flagged, 3 I/O failure.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Flagged(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Flagged(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<spam_purify::Error> for CliError {
    fn from(err: spam_purify::Error) -> Self {
        match err {
            spam_purify::Error::InconsistentDistribution { .. }
            | spam_purify::Error::IterationLimit { .. }
            | spam_purify::Error::EigenNoConvergence => CliError::Flagged(err.to_string()),
            _ => CliError::Invalid(err.to_string()),
        }
    }
}
