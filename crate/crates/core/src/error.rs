use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("parallel edge between vertices {0} and {1}")]
    ParallelEdge(usize, usize),
    #[error("weight of vertex {0} must be positive")]
    NonpositiveWeight(usize),
    #[error("length of edge ({0}, {1}) must be positive")]
    NonpositiveLength(usize, usize),
    #[error("k = {k} is outside 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("operation requires unit vertex weights")]
    Weighted,
    #[error("graph is not a tree")]
    NotATree,
    #[error("no candidate value is feasible")]
    NoFeasibleCandidate,
    #[error("instance too large for the brute-force oracle: {0}")]
    TooLarge(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
