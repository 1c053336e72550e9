use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: pattern has {pattern} counts but input has {input} bits")]
    LengthMismatch { pattern: usize, input: usize },

    #[error("bit string of length {0} exceeds the 64-bit limit")]
    TooLong(usize),

    #[error("memory budget exceeded: need {required} bytes, budget is {available} bytes")]
    MemoryBudget { required: u64, available: u64 },

    #[error("row {row} sums to {sum}, expected 1")]
    NotStochastic { row: usize, sum: f64 },

    #[error("invalid input distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid output partition: {0}")]
    InvalidPartition(String),

    #[error("instance too large for exhaustive enumeration: {0} patterns")]
    InstanceTooLarge(u128),

    #[error("expected a 2-input channel, got {0} inputs")]
    NotBinaryInput(usize),

    #[error("corrupt cache file {path}: {reason}")]
    CorruptCache { path: PathBuf, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
