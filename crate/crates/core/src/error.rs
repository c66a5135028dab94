use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed delimited input: {0}")]
    Csv(#[from] csv::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("column map references columns absent from the header: {0:?}")]
    MissingColumns(Vec<String>),

    #[error("column map is missing a required field: {0}")]
    MissingField(&'static str),

    #[error("unknown candidate: {0}")]
    UnknownCandidate(String),

    #[error("round {submitted} is not open (current round is {current})")]
    RoundNotOpen { submitted: u32, current: u32 },

    #[error("round cannot close: unresolved candidates without a resolution or deferral: {0:?}")]
    UnaddressedDiscrepancies(Vec<String>),

    #[error("invalid verdict for this operation: {0}")]
    InvalidVerdict(String),

    #[error("distribution has no positive weight")]
    EmptyDistribution,

    #[error("need at least {needed} usable points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("series endpoints must be positive")]
    NonPositiveEndpoints,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("input is constant; rank correlation is undefined")]
    ConstantInput,

    #[error("incomplete partition: node {0} has no community")]
    IncompletePartition(String),

    #[error("graph is empty")]
    EmptyGraph,

    #[error("self-loop on node {0}")]
    SelfLoop(String),

    #[error("unknown node: {0}")]
    UnknownNode(String),

    #[error("embedding error: {0}")]
    Embedding(String),

    #[error("zero vector for term {0}")]
    ZeroVector(String),

    #[error("cluster count {k} out of range 1..={n}")]
    ClusterCountOutOfRange { k: usize, n: usize },

    #[error("labeling error: {0}")]
    Labeling(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
