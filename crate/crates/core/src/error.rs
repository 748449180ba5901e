use thiserror::Error;

use crate::tensor::Party;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("shape mismatch: expected {expected} values, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("scenario mismatch: {0}")]
    ScenarioMismatch(String),

    #[error("not a probability distribution: {0}")]
    Distribution(String),

    #[error("mixture weights must be nonnegative and sum to 1 (sum = {sum})")]
    WeightSum { sum: f64 },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("{party} signals: marginal differs by {defect:.3e} between inputs {inputs:?}")]
    Signaling {
        party: Party,
        inputs: (usize, usize),
        defect: f64,
    },

    #[error("numerical breakdown: {0}")]
    Numerical(String),

    #[error("size cap exceeded: {what} = {size} > {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("realization error: {0}")]
    Realization(String),

    #[error("codec error: {0}")]
    Codec(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
