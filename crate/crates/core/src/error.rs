use thiserror::Error;

use crate::metric::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed arguments or data that is not a metric at all.
    #[error("invalid input: {0}")]
    Input(String),

    /// A matrix that was parsed fine but violates the metric axioms.
    #[error("not a metric: {} violation(s)", .0.violations.len())]
    InvalidMetric(ValidationReport),

    #[error("resource limit exceeded: {what} needs {requested}, cap is {cap}")]
    Resource {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
