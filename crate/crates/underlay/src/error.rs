//! Error type shared by all library modules.

use thiserror::Error;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Validation and domain errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("{name} must be nonnegative, got {value}")]
    Negative { name: &'static str, value: f64 },

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("subset of MTD indices must be nonempty")]
    EmptySubset,

    #[error("MTD index {index} out of range for {count} devices")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("duplicate MTD index {index} in subset")]
    DuplicateIndex { index: usize },

    #[error("MTD count must be between 1 and {max}, got {count}")]
    MtdCountOutOfRange { count: usize, max: usize },

    #[error("path-loss exponent must exceed 2, got {alpha}")]
    AlphaNotAboveTwo { alpha: f64 },

    #[error("SNR grid must be sorted in ascending order")]
    UnsortedGrid,

    #[error("sweep values must be nonempty")]
    EmptySweep,

    #[error("rate inflation factor must be >= 1, got {0}")]
    InflationBelowOne(f64),

    #[error("trial count must be >= 1")]
    NoTrials,

    #[error("single-user decoding mean rate is defined for exactly one MTD, got {n_m}")]
    SdMeanRateNeedsSingleMtd { n_m: usize },
}
