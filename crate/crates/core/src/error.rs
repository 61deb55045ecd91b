use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("undefined for empty sequence")]
    EmptySequence,
    #[error("sequence is deterministic")]
    DeterministicSequence,
    #[error("sequence too short: need at least {need} bits, got {got}")]
    SequenceTooShort { need: usize, got: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("partition covers {partition} bits but sequence has {sequence}")]
    PartitionLengthMismatch { partition: usize, sequence: usize },
    #[error("invalid smoothing parameter: {0}")]
    InvalidParameter(String),
    #[error("smoothing rate index must be at least 1")]
    ZeroRateIndex,
    #[error("probability {0} outside the open interval (0, 1)")]
    InvalidProbability(f64),
    #[error("beta table holds {got} entries, {need} required")]
    BetaTableTooShort { need: usize, got: usize },
    #[error("length {0} exceeds the exhaustive enumeration limit")]
    EnumerationTooLarge(usize),
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
    #[error("not an ESP container")]
    BadMagic,
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),
    #[error("unknown schedule id {0}")]
    UnknownSchedule(u8),
    #[error("container truncated")]
    Truncated,
    #[error("declared bit length {0} is too large")]
    BitLengthOverflow(u64),
    #[error("{0} trailing bytes after payload")]
    TrailingData(usize),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
