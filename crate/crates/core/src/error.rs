use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("tensor must be cubical (l = m = n), got {0}x{1}x{2}")]
    NotCubical(usize, usize, usize),

    #[error("tensor is identically zero")]
    ZeroTensor,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("improper coloring: adjacent vertices {0} and {1} share a color")]
    ImproperColoring(usize, usize),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dims_err(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}
