use thiserror::Error;

use crate::hypergraph::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised for malformed input or out-of-domain parameters.
///
/// Algorithmic failures (a colorer giving up) are not errors; they are
/// reported as [`crate::Failure`] inside a [`crate::ColorOutcome`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {0} has no color assigned")]
    MissingAssignment(VertexId),

    #[error("instance too large for exhaustive search: {what} is {actual}, limit {limit}")]
    InstanceTooLarge {
        what: &'static str,
        actual: u64,
        limit: u64,
    },

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("invalid hyperedge: {0}")]
    InvalidEdge(String),

    #[error("edge has {found} vertices, expected uniformity {expected}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("vertex {vertex} outside declared universe 1..={universe}")]
    OutOfUniverse { vertex: VertexId, universe: u32 },

    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },

    #[error("algorithm {algorithm} returned a coloring with {violations} monochromatic edges")]
    Soundness {
        algorithm: &'static str,
        violations: usize,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("expected {expected} vertices, found {found}")]
    WrongArity { expected: usize, found: usize },
    #[error("vertex {0} repeated within an edge")]
    DuplicateVertex(VertexId),
    #[error("vertex {vertex} outside declared universe 1..={universe}")]
    OutOfUniverse { vertex: VertexId, universe: u32 },
    #[error("invalid vertex id {0:?}")]
    BadVertex(String),
    #[error("invalid color {0:?}")]
    BadColor(String),
}
