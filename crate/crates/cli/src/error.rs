use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Engine(#[from] ccm_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0} of the acceptance criteria failed")]
    Verification(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use ccm_core::Error as E;
        match self {
            CliError::Parse { .. } | CliError::Schema(_) => 2,
            CliError::Io(_) => 4,
            CliError::Verification(_) => 1,
            CliError::Engine(e) => match e {
                E::InvariantViolation(_) => 1,
                E::UnsupportedForClass(_) | E::QuotientTooLarge { .. } | E::EnumerationExhausted { .. } | E::HypothesisFails(_) => 3,
                _ => 2,
            },
        }
    }

    pub fn schema(msg: impl Into<String>) -> Self {
        CliError::Schema(msg.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;
