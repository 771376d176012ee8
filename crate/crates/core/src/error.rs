use thiserror::Error;

/// Errors raised while building hypergraphs, partitions and imbalance bounds.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("hyperedge {edge} contains vertex {vertex} more than once")]
    DuplicatePin { edge: usize, vertex: usize },
    #[error("hyperedge {edge} has no pins")]
    EmptyEdge { edge: usize },
    #[error("hyperedge {edge} references vertex {vertex}, but there are only {num_vertices} vertices")]
    PinOutOfRange {
        edge: usize,
        vertex: usize,
        num_vertices: usize,
    },
    #[error("hyperedge {edge} has non-positive weight {weight}")]
    NonPositiveEdgeWeight { edge: usize, weight: i64 },
    #[error("vertex {vertex} has invalid weight {weight} in dimension {dim}")]
    InvalidVertexWeight { vertex: usize, dim: usize, weight: f64 },
    #[error("vertex {vertex} has {found} weight entries, expected {expected}")]
    WeightDimensionMismatch {
        vertex: usize,
        expected: usize,
        found: usize,
    },
    #[error("expected {expected} edge weights, found {found}")]
    EdgeWeightCountMismatch { expected: usize, found: usize },
    #[error("weight dimensionality must be at least 1")]
    NoDimensions,
    #[error("block count must be at least 2, got {0}")]
    TooFewBlocks(usize),
    #[error("weight dimension {0} has zero total weight and cannot be normalized")]
    ZeroTotalWeight(usize),
    #[error("block id {block} of vertex {vertex} is out of range for k = {k}")]
    BlockOutOfRange { vertex: usize, block: usize, k: usize },
    #[error("assignment covers {found} vertices, hypergraph has {expected}")]
    AssignmentLength { expected: usize, found: usize },
    #[error("vertex {0} is already in the target block")]
    SameBlockMove(usize),
    #[error("imbalance parameter must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("weight threshold must be positive, got {0}")]
    NonPositiveThreshold(f64),
    #[error(
        "bound for dimension {dim} is {value} <= 0; epsilon is too small relative to the weight threshold, use a smaller t"
    )]
    NonPositiveBound { dim: usize, value: f64 },
    #[error("bound override has {found} entries, expected {expected}")]
    BoundDimensionMismatch { expected: usize, found: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
