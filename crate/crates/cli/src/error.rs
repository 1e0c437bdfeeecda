use thiserror::Error;

/// Exit code for a run that correctly reported non-convergence.
pub const EXIT_NOT_CONVERGED: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Model(#[from] mdpdec::Error),
    #[error("unknown scenario `{0}`")]
    ScenarioUnknown(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}
