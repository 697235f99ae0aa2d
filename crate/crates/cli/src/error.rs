use thiserror::Error;

/// Failures mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or out-of-range input.
    #[error("invalid input: {0}")]
    Input(String),
    /// Input is well formed but the requested operation does not apply.
    #[error("{0}")]
    Semantic(String),
    /// A numerical routine failed to converge.
    #[error("numerical failure: {0}")]
    NonConvergence(String),
    /// Output could not be written.
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Semantic(_) => 3,
            CliError::NonConvergence(_) => 4,
            CliError::Output(_) => 1,
        }
    }
}

impl From<gentleak_core::Error> for CliError {
    fn from(e: gentleak_core::Error) -> Self {
        let mut root = &e;
        while let gentleak_core::Error::Item { source, .. } = root {
            root = source;
        }
        match root {
            gentleak_core::Error::NoConvergence { .. } => CliError::NonConvergence(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}
