use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph file line {line}: {msg}")]
    GraphFormat { line: usize, msg: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("event syntax error at {pos}: {msg}")]
    EventSyntax { pos: usize, msg: String },

    #[error("strategy spec error: {0}")]
    StrategySpec(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    #[error("configuration has {got} edges, graph has {expected}")]
    IndexMismatch { expected: usize, got: usize },

    #[error("graph has no rotation system")]
    MissingRotation,

    #[error("graph has no outer face anchor")]
    MissingOuterFace,

    #[error("size guard: {what} is {actual}, limit {limit}")]
    SizeGuard {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("event `{0}` is not increasing")]
    NotIncreasing(String),

    #[error("policy error: {0}")]
    Policy(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

impl Error {
    pub fn is_size_guard(&self) -> bool {
        matches!(self, Error::SizeGuard { .. })
    }

    pub(crate) fn guard(what: &'static str, actual: usize, limit: usize) -> Result<()> {
        if actual > limit {
            Err(Error::SizeGuard {
                what,
                actual,
                limit,
            })
        } else {
            Ok(())
        }
    }
}
