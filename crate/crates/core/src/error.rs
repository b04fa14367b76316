use thiserror::Error;

/// Errors raised by the numerical and symbolic routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {index} exceeds the supported cap {cap}")]
    IndexOverCap { index: usize, cap: usize },

    #[error("Laguerre order -{k} requires 1 <= {k} <= degree {n}")]
    NegativeOrderExceedsDegree { k: usize, n: usize },

    #[error("Laguerre order {0} is negative and not an integer")]
    NonIntegerNegativeOrder(f64),

    #[error("confluent hypergeometric lower parameter b = {0} is a non-positive integer")]
    ForbiddenLowerParameter(f64),

    #[error("series did not converge within {terms} terms")]
    SeriesDiverged { terms: usize },

    #[error("operation is undefined on the zero polynomial")]
    ZeroPolynomial,

    #[error("quadrature rule of size {n} is outside 1..={max}")]
    InvalidRuleSize { n: usize, max: usize },

    #[error("root finding for the {n}-point rule did not converge")]
    QuadratureNotConverged { n: usize },

    #[error("non-finite integrand value at node {node}")]
    NonFinite { node: usize },

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
