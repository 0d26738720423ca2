use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a hypergraph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("position {position} out of range for an ordering of {n} vertices")]
    PositionOutOfRange { position: usize, n: usize },

    #[error("invalid edge {edge:?}: {reason}")]
    InvalidEdge { edge: Vec<u32>, reason: String },

    #[error("duplicate edge {0:?}")]
    DuplicateEdge(Vec<u32>),

    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("malformed intersection pattern {pattern:?}: {reason}")]
    MalformedPattern { pattern: Vec<usize>, reason: String },

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this error: 1 usage/config, 2 resource cap,
    /// 3 internal invariant violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ResourceCap(_) => 2,
            Error::Internal(_) => 3,
            _ => 1,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
