use thiserror::Error;

use crate::expr::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point lies outside the set where a function, inverse or chart is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("usage error: {0}")]
    Usage(String),

    /// A finite-difference estimate failed its smoothness check or left the domain.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("point too close to the real axis (rho = {rho:e} < {eps:e})")]
    TooCloseToRealAxis { rho: f64, eps: f64 },

    #[error("chart {chart} is not defined at this point: {reason}")]
    ChartDomain { chart: String, reason: String },

    #[error("charts {alpha} and {beta} do not overlap")]
    EmptyOverlap { alpha: String, beta: String },

    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
