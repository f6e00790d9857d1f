use thiserror::Error;

/// Errors shared across the crate. Input validation failures are kept as
/// distinct variants so callers (and the CLI) can map them to exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range 1..={max}")]
    VertexOutOfRange { vertex: u32, max: u32 },

    #[error("edge {edge:?} has a repeated vertex")]
    RepeatedVertex { edge: Vec<u16> },

    #[error("edge {edge:?} has {got} vertices, expected {expected}")]
    WrongCardinality {
        edge: Vec<u16>,
        got: usize,
        expected: usize,
    },

    #[error("duplicate edge {edge:?}")]
    DuplicateEdge { edge: Vec<u16> },

    #[error("hypergraph has no edges: {quantity} is undefined")]
    DegenerateInstance { quantity: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("scale guard exceeded: {0}")]
    ScaleGuard(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn scale(msg: impl Into<String>) -> Self {
        Error::ScaleGuard(msg.into())
    }
}
