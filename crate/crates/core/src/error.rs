use thiserror::Error;

/// Errors raised by domain construction, decompositions and estimators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("quadrature order {order} too small for polynomial degree bound k = {k}")]
    QuadratureInsufficient { order: usize, k: usize },
    #[error("lookup failed: {0}")]
    Lookup(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("undefined result: {0}")]
    Undefined(String),
}

pub type Result<T> = std::result::Result<T, Error>;
