use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph parameters for {family}: {reason}")]
    InvalidParameter { family: &'static str, reason: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph must be connected: {0}")]
    Disconnected(&'static str),

    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("universe mismatch: expected {expected} vertices, got {found}")]
    UniverseMismatch { expected: usize, found: usize },

    #[error(
        "eigenvalue clustering is ambiguous near {value:.12} (gap {gap:.3e} vs eigen_tol {tol:.3e}); try a different --eigen-tol"
    )]
    AmbiguousClusters { value: f64, gap: f64, tol: f64 },

    #[error("infeasible strongly regular parameters: {0}")]
    InfeasibleSrg(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("too large: {0}")]
    TooLarge(String),

    #[error("group closure exceeded cap {cap} (reached {reached} elements)")]
    GroupOverflow { cap: usize, reached: usize },

    #[error("permutation {index} is not an automorphism of the graph")]
    NotAutomorphism { index: usize },

    #[error("non-integer spectrum: eigenvalue {0:.12} is not an integer")]
    NonIntegerSpectrum(f64),

    #[error("annihilation check failed: candidate integer eigenvalues {0:?} do not annihilate A")]
    AnnihilationFailed(Vec<i64>),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }

    pub(crate) fn param(family: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            family,
            reason: reason.into(),
        }
    }
}
