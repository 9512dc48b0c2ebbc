//! Library side of the `runwait` command: route dispatch, output formats,
//! the cross-check report and the dice paradox search.

pub mod app;
pub mod crosscheck;
pub mod output;
pub mod paradox;
pub mod routes;

use thiserror::Error;

/// Failure classes, mapped to process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad user input; exit code 1.
    #[error("{0}")]
    Validation(String),
    /// Broken invariant or failed cross-check; exit code 2.
    #[error("{0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Invariant(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Invariant(_) => "invariant",
        }
    }

    /// One-line JSON object for standard error.
    pub fn to_json_line(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

impl From<runwait_core::Error> for CliError {
    fn from(e: runwait_core::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Invariant(e.to_string())
        }
    }
}
