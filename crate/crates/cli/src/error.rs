use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at `{path}` (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("shape error at `{path}`: {message}")]
    Shape { path: String, message: String },
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] cstarlab::Error),
}

impl CliError {
    /// Process exit code: 2 for malformed input, 1 when the computation
    /// itself rejected the input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn shape(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Shape {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
