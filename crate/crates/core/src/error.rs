use thiserror::Error;

/// Errors raised while building or editing graphs.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0} is not allowed")]
    SelfLoop(usize),
    #[error("vertex {0} out of range for a graph on {1} vertices")]
    VertexOutOfRange(usize, usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown edge id {0}")]
    UnknownEdge(usize),
    #[error("graph is not connected")]
    Disconnected,
}

/// Errors raised by the algorithms built on top of [`crate::graph`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph is not biconnected")]
    NotBiconnected,
    #[error("graph is not planar")]
    NonPlanar,
    #[error("sequence is not a permutation of the vertex set")]
    NotPermutation,
    #[error("instance with {n} vertices exceeds the configured cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("decomposition width {width} exceeds the cap of {cap}")]
    WidthExceeded { width: usize, cap: usize },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("internal inconsistency: {0}")]
    Integrity(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
