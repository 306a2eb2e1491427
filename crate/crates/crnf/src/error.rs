use thiserror::Error;

/// Failures of the command-line front end, each tied to a stable exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("consistency check failed: {0}")]
    Consistency(String),
    #[error("convergence criterion fails: residual has {0} terms")]
    Crucial(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Read { .. } => exit::PARSE,
            CliError::Validation(_) => exit::VALIDATION,
            CliError::Consistency(_) | CliError::Write { .. } => exit::CONSISTENCY,
            CliError::Crucial(_) => exit::CRUCIAL,
        }
    }
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// Unreadable input: IO failure, malformed JSON or series text, bad rational, bad usage.
    pub const PARSE: i32 = 1;
    /// Well-formed input violating a mathematical requirement.
    pub const VALIDATION: i32 = 2;
    /// A produced artifact failed re-verification, or a checked object is not in normal form.
    pub const CONSISTENCY: i32 = 3;
    /// `diagnose --crucial`: the convergence criterion residual is nonzero.
    pub const CRUCIAL: i32 = 4;
}
