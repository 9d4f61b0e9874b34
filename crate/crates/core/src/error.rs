use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed object: {0}")]
    MalformedObject(String),

    #[error("malformed map: {0}")]
    MalformedMap(String),

    #[error("maps do not compose: {0}")]
    NotComposable(String),

    #[error("malformed diagram: {0}")]
    MalformedDiagram(String),

    #[error("index violation: {0}")]
    Index(#[from] crate::index::IndexViolation),

    #[error("structure maps are not functorial at {from} -> {to}: {detail}")]
    NotFunctorial { from: String, to: String, detail: String },

    #[error("level map is not natural at {from} -> {to}")]
    NotNatural { from: String, to: String },

    #[error("square does not commute: {0}")]
    NonCommuting(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("missing inverse witness h({t}, {s})")]
    MissingWitness { t: String, s: String },

    #[error("chain-category quotient is not posetal: {0}")]
    NonPosetal(String),

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    #[error("depth {depth} exhausted: {detail}")]
    DepthExhausted { depth: usize, detail: String },

    #[error("mixed instances: {0}")]
    MixedInstances(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
