use thiserror::Error;

use crate::netgraph::Edge;

/// Errors produced by model construction and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {0} out of range 1..={1}")]
    NodeOutOfRange(usize, usize),
    #[error("edge ({0}, {1}) is not an edge of the model")]
    UnknownEdge(usize, usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("fixed weight of edge ({0}, {1}) is zero; a zero weight means the edge does not exist")]
    ZeroFixedWeight(usize, usize),
    #[error("weight pattern refers to ({0}, {1}) which is not an edge of the model")]
    PatternEdgeMissing(usize, usize),
    #[error("sensor set must be non-empty")]
    EmptySensors,
    #[error("failure scenario must contain at least one edge")]
    EmptyScenario,
    #[error("failed nodes {0:?} have no adjacent edges; the node failure is degenerate")]
    DegenerateNodeFailure(Vec<usize>),
    #[error("failure set must contain at least one scenario")]
    EmptyFailureSet,
    #[error("failure set contains duplicate scenarios at positions {0} and {1}")]
    DuplicateScenario(usize, usize),
    #[error("scenarios are identical as edge sets; they can never be distinguished")]
    IdenticalScenarios,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("linear solve failed after {0} retries with fresh sample points")]
    SolveFailed(usize),
    #[error("scenario pair ({0}, {1}) is not pairwise distinguishable; no witness state exists")]
    NotPairwiseDistinguishable(usize, usize),
    #[error("witness certification failed after {0} draws")]
    WitnessExhausted(usize),
    #[error("transfer index is 0; no sensor placement can detect any failure")]
    ZeroTransferIndex,
    #[error("no sensor location can generically distinguish scenarios {0} and {1}")]
    InfeasiblePair(usize, usize),
    #[error("ground set of size {0} exceeds the exact-solver limit {1}")]
    GroundSetTooLarge(usize, usize),
    #[error("target with empty node set (origin: {0})")]
    EmptyTarget(String),
    #[error("trajectory grids or initial states do not match")]
    TrajectoryMismatch,
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("failure edges {0:?} are not edges of the model")]
    FailureEdgesMissing(Vec<Edge>),
    #[error("unknown scenario name '{0}'")]
    UnknownScenario(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid network description: {0}")]
    InvalidDescription(String),
}

pub type Result<T> = std::result::Result<T, Error>;
