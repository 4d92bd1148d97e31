use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("partition has {got} entries but graph has {expected} vertices")]
    SizeMismatch { expected: usize, got: usize },

    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),

    #[error("vertex {0} appears more than once")]
    DuplicateVertex(usize),

    #[error("quotient cost undefined: one side of the partition is empty")]
    EmptySide,

    #[error("graph has no coordinates")]
    MissingCoords,

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("gave up after {0} rejected samples")]
    RetryCapExceeded(usize),

    #[error("no unplaced vertex left to select")]
    NothingToSelect,

    #[error("invalid path extension: {0}")]
    InvalidExtension(String),

    #[error("{0}")]
    Degenerate(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
