use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex {vertex} lists neighbor {neighbor}, which is not a vertex")]
    VertexOutOfRange { vertex: usize, neighbor: usize },

    #[error("vertex {0} lists itself as a neighbor")]
    SelfLoop(usize),

    #[error("vertex {vertex} lists neighbor {neighbor} more than once")]
    RepeatedNeighbor { vertex: usize, neighbor: usize },

    #[error("adjacency is not symmetric: {from} lists {to} but not the reverse")]
    NonSymmetricAdjacency { from: usize, to: usize },

    #[error("graph is not connected")]
    DisconnectedGraph,

    #[error("rotation system is not a plane embedding: V - E + F = {euler}, expected 2")]
    NonPlanarEmbedding { euler: i64 },

    #[error("outer face index {index} out of range ({faces} faces)")]
    OuterFaceOutOfRange { index: usize, faces: usize },

    #[error("brute-force enumeration limited to {limit} vertices, graph has {vertices}")]
    SizeLimitExceeded { vertices: usize, limit: usize },

    #[error("orientation does not cover the edges of the graph: {0}")]
    EdgeCoverageMismatch(String),

    #[error("skew determinant {0} is not a perfect square")]
    NonSquareDeterminant(String),

    #[error("link data cannot be stitched into a plane embedding: {0}")]
    NonPlanarStitching(String),

    #[error("graph is not bipartite")]
    NotBipartite,

    #[error("invalid symmetric quotient: {0}")]
    InvalidQuotient(String),

    #[error("declared local width {declared} disagrees with the embedding ({computed})")]
    WidthMismatch { declared: usize, computed: usize },

    #[error("link polarities do not yield a Pfaffian orientation of the expansion")]
    InvalidPolarity,

    #[error("index {index} out of range 0..{bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("weight has modulus {0}, expected 1")]
    NonUnitWeight(f64),

    #[error("{what}: value {value} is {distance:.3e} away from the nearest integer (guard {guard:.3e})")]
    RoundingGuardFailure {
        what: String,
        value: String,
        distance: f64,
        guard: f64,
    },

    #[error("product formula is not integral: {0}")]
    NonIntegralResult(String),

    #[error("quadrature did not reach tolerance {tolerance:.1e} (estimate {estimate:.3e}) within depth {depth}")]
    QuadratureNonConvergence {
        tolerance: f64,
        estimate: f64,
        depth: u32,
    },

    #[error("characteristic polynomial takes negative value {value} at ({x}, {y})")]
    NegativeArgument { value: f64, x: f64, y: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("method `{method}` does not apply to {target}")]
    Unsupported { method: String, target: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}
