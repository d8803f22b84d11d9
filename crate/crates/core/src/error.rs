use thiserror::Error;

/// Errors raised by the toolkit. Messages name the violated invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("letter {letter} out of range for rank {rank}")]
    LetterOutOfRange { letter: i32, rank: usize },
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("invalid Whitehead move: {0}")]
    InvalidMove(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("empty word where a nontrivial one is required")]
    EmptyWord,
    #[error("automorphism is not certified as bijective")]
    Unverified,
    #[error("not a basis: {0}")]
    NotABasis(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("broken edge path: {0}")]
    BrokenPath(String),
    #[error("inconsistent map: {0}")]
    InconsistentMap(String),
    #[error("not a train-track map: {0}")]
    NotTrainTrack(String),
    #[error("transition matrix is reducible")]
    Reducible,
    #[error("expansion factor {lambda} is not > 1")]
    NotExpanding { lambda: f64 },
    #[error("did not converge: {0}")]
    NoConvergence(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("disconnected Whitehead graph: {0}")]
    Disconnected(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
