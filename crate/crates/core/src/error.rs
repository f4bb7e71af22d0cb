use thiserror::Error;

/// Errors raised across the workbench.
///
/// Each variant maps onto one process exit code (see [`Error::exit_code`]),
/// which the CLI and the C ABI both expose.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet error: {0}")]
    Alphabet(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("resource error: {what} exceeds the budget of {budget}")]
    Resource { what: String, budget: usize },

    #[error("range error: {0}")]
    Range(String),

    #[error("structural failure: {0}")]
    Structural(String),

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("invalid config: field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Exit code for this error: 1 invalid input, 3 resource exhaustion,
    /// 4 I/O. Property failures are not errors and exit with 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource { .. } => 3,
            Error::Io(_) => 4,
            Error::Structural(_) => 2,
            _ => 1,
        }
    }
}
