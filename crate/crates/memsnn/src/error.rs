//! Error types shared across the simulation modules.

use thiserror::Error;

/// Errors raised by the core simulation primitives.
#[derive(Debug, Error)]
pub enum ModelError {
    /// A parameter or argument violates a documented invariant.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// An operation was asked to evolve a state backwards in time.
    #[error("time went backwards: t = {t} s, last update = {last} s")]
    TimeReversed { t: f64, last: f64 },

    /// Integration step exceeds the stability bound for the requested drive.
    #[error("integration step too large: dt = {dt} s, limit = {limit} s")]
    StepTooLarge { dt: f64, limit: f64 },

    /// A trace or dataset that must be non-empty was empty.
    #[error("empty {0}")]
    Empty(&'static str),

    /// Input spike trains handed to the event loop were malformed.
    #[error("bad event stream: {0}")]
    BadEvents(String),
}

/// Errors raised while loading or validating dataset files.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: expected 65 comma-separated integers, found {found} fields")]
    FieldCount {
        path: String,
        line: usize,
        found: usize,
    },

    #[error("{path}:{line}: bad integer {text:?}")]
    BadInt {
        path: String,
        line: usize,
        text: String,
    },

    #[error("{path}:{line}: pixel value {value} outside 0..=16")]
    PixelRange {
        path: String,
        line: usize,
        value: i64,
    },

    #[error("{path}:{line}: label {value} outside 0..=9")]
    LabelRange {
        path: String,
        line: usize,
        value: i64,
    },

    #[error("{path}: no samples found")]
    EmptyFile { path: String },

    #[error("digit filter is empty")]
    EmptyDigitSet,

    #[error("digit filter {digits:?} matched no samples")]
    EmptySubset { digits: Vec<u8> },

    #[error("digit {0} outside 0..=9")]
    BadDigit(u8),
}
