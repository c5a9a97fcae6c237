use thiserror::Error;

/// Process exit codes.
pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_LIMIT: u8 = 2;
pub const EXIT_INVARIANT: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid distribution in row {row}: {source}")]
    Row {
        row: usize,
        #[source]
        source: emdkit::Error,
    },
    #[error("{0}")]
    Core(#[from] emdkit::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e {
                emdkit::Error::BudgetExceeded { .. } | emdkit::Error::ThresholdExceeded { .. } => EXIT_LIMIT,
                emdkit::Error::Invariant(_) => EXIT_INVARIANT,
                _ => EXIT_INPUT,
            },
            CliError::Parse(_) | CliError::Row { .. } | CliError::Io(_) => EXIT_INPUT,
        }
    }

    /// Extra guidance printed after the message, if any.
    pub fn hint(&self) -> Option<&'static str> {
        match self {
            CliError::Core(emdkit::Error::ThresholdExceeded { .. }) => {
                Some("use --method quadrature, or raise EMDKIT_EXACT_THRESHOLD")
            }
            CliError::Core(emdkit::Error::BudgetExceeded { .. }) => Some("raise --budget or shrink the input"),
            _ => None,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
