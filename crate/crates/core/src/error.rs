use thiserror::Error;

/// Errors produced by the balanced-cut toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed graph file; `line` is 1-based.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("dimension mismatch: expected length {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// The denominator of the ratio vanished (or the numerator went negative).
    #[error("degenerate point: {0}")]
    Degenerate(String),

    #[error("invalid set function: {0}")]
    SetFunction(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("graph is disconnected ({components} connected components)")]
    Disconnected { components: usize },

    #[error("graph has {n} vertices; exhaustive search is limited to {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("relaxation check failed: {0}")]
    Relaxation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
