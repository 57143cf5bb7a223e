use thiserror::Error;

/// Errors raised by the solvers, the sweep harness and the config reader.
///
/// Infeasibility is not an error: solvers report it through
/// [`SolveOutcome::Infeasible`](crate::SolveOutcome::Infeasible).
#[derive(Debug, Error)]
pub enum NomaError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index {index} out of range for {len} users")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, NomaError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(NomaError::InvalidInput(msg.into()))
}
