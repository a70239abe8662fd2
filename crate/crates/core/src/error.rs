use thiserror::Error;

/// Errors raised by network construction, evaluation and the pipelines.
#[derive(Debug, Error)]
pub enum QnetError {
    #[error("rejected input: {0}")]
    RejectedInput(String),

    #[error("capacity exceeded: {what} = {requested} > cap {cap}")]
    Capacity {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("cannot renormalize a zero-norm branch")]
    DegenerateBranch,

    #[error("cannot measure a zero-norm state")]
    DegenerateState,

    #[error("outcome {0} has zero probability")]
    ImpossibleOutcome(usize),

    #[error("network is not invertible: contains {0}")]
    NonInvertible(&'static str),

    #[error("composition error: {0}")]
    Composition(String),

    #[error("serialization error: {0}")]
    Serialization(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for QnetError {
    fn from(e: serde_json::Error) -> Self {
        QnetError::Serialization(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, QnetError>;

pub(crate) fn reject<T>(msg: impl Into<String>) -> Result<T> {
    Err(QnetError::RejectedInput(msg.into()))
}
