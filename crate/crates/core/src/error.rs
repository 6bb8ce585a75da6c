use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("eigensolver did not converge on {matrix} after {sweeps} sweeps")]
    NoConvergence { matrix: String, sweeps: usize },

    #[error("state tracking failed at {field_g} G: {reason}")]
    TrackingFailure { field_g: f64, reason: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
