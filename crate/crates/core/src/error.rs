use crate::tree::Edge;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("edge {0} is not part of the tree")]
    MissingEdge(Edge),

    #[error("components overlap or are empty")]
    InvalidPartition,

    #[error("swap (remove {remove}, insert {insert}) does not reconnect the split tree")]
    InvalidSwap { remove: Edge, insert: Edge },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no candidates to choose from")]
    EmptyCandidates,

    #[error("instance has {n} stations; exhaustive enumeration is limited to {limit} (use force to override)")]
    SizeGuard { n: usize, limit: usize },

    #[error("Prüfer label {label} out of range for {n} stations")]
    PruferLabel { label: usize, n: usize },

    #[error("{path}: row {row}: {message}")]
    Data {
        path: String,
        row: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
