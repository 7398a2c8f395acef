//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sample has {got} observations, need at least {min}")]
    SampleTooSmall { min: usize, got: usize },

    #[error("paired samples have mismatched lengths: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("non-finite value at position {index}")]
    NonFinite { index: usize },

    #[error("sample contains ties; jitter it first")]
    TiesPresent,

    #[error("probability {value} outside {bounds}")]
    ProbabilityOutOfRange { value: f64, bounds: &'static str },

    #[error("bandwidth matrix is not positive definite")]
    DegenerateBandwidth,

    #[error("quadrature size {0} outside 1..=64")]
    QuadratureSize(usize),

    #[error("kernel matrix factorization failed even at maximal diagonal jitter")]
    KernelFactorization,

    #[error("function sample input too long: {got} > {max}")]
    GpInputTooLong { got: usize, max: usize },

    #[error("unknown scenario family: {0:?}")]
    UnknownFamily(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("ranking metric needs both classes present")]
    SingleClass,

    #[error("weights must be positive and sum to a positive value")]
    InvalidWeights,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("pair {id}: {message}")]
    PairLoad { id: String, message: String },

    #[error("graph error: {0}")]
    Graph(String),

    #[error("thread pool: {0}")]
    ThreadPool(String),
}
