use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),

    #[error("disconnected chain: lambda2 = {lambda2}")]
    DisconnectedChain { lambda2: f64 },

    #[error("test function has zero Dirichlet energy but is not constant")]
    DisconnectedDirection,

    #[error("invalid merge map: {0}")]
    InvalidMap(String),

    #[error("invalid flow: {reason}")]
    InvalidFlow {
        reason: String,
        /// Offending ordered pair or edge, when one can be named.
        pair: Option<(usize, usize)>,
    },

    #[error("unsupported instance: {0}")]
    UnsupportedInstance(String),

    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
