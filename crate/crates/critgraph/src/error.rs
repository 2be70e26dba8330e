use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("total degree {0} is odd")]
    OddTotalDegree(u64),
    #[error("no simple graph accepted after {attempts} attempts")]
    RejectionExhausted { attempts: usize },
    #[error("quadrature did not reach tolerance: estimate {estimate}, error bound {error}")]
    Quadrature { estimate: f64, error: f64 },
    #[error("incomplete walk: {0}")]
    IncompleteWalk(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
