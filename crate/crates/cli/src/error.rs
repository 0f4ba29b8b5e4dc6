use serde::Serialize;
use thiserror::Error;

/// Process exit codes.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: scenario file, parameters, formats.
    #[error("validation error: {0}")]
    Validation(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// A core operation failed on input that had already validated.
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io { .. } => EXIT_VALIDATION,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Io { .. } => "io",
            CliError::Internal(_) => "internal",
        }
    }

    /// Machine-readable form written to stderr on failure.
    pub fn to_document(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            error: Inner<'a>,
        }
        #[derive(Serialize)]
        struct Inner<'a> {
            kind: &'a str,
            exit_code: i32,
            message: String,
        }
        let doc = Doc { error: Inner { kind: self.kind(), exit_code: self.exit_code(), message: self.to_string() } };
        serde_json::to_string_pretty(&doc).expect("error document serializes")
    }
}

impl From<qrf_core::Error> for CliError {
    fn from(e: qrf_core::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
