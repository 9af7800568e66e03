use thiserror::Error;

/// Errors raised by the library. Every variant is a rejected input; the
/// numerical routines themselves never fail on valid data.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("contraction ratio {0} outside (0, 1/2)")]
    LambdaOutOfRange(f64),
    #[error("depth {depth} outside 1..={max}")]
    DepthOutOfRange { depth: usize, max: usize },
    #[error("{n} terminals outside the exhaustive range {min}..={max}; supply a topology instead")]
    TerminalCap { n: usize, min: usize, max: usize },
    #[error("invalid terminal specification: {0}")]
    InvalidSpec(String),
    #[error("empty point set")]
    Empty,
    #[error("series diverges for lambda = {0}")]
    Divergent(f64),
    #[error("line normals do not sum to zero (residual {0:e})")]
    UnbalancedNormals(f64),
    #[error("solver did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
