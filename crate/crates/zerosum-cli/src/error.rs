use thiserror::Error;

/// Command failures, each mapping to a stable process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable files, schema violations, invariant violations, and
    /// spec/report mismatches.
    #[error("input error: {0}")]
    Input(String),
    /// The solver failed on a valid instance.
    #[error("solver error: {0}")]
    Solver(String),
    /// A report did not withstand re-verification.
    #[error("verification failed: {0}")]
    Verification(String),
    /// An instance exceeded a size cap.
    #[error("resource limit: {0}")]
    ResourceLimit(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Verification(_) => 4,
            CliError::ResourceLimit(_) => 5,
        }
    }
}
