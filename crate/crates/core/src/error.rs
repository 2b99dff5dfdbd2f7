use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error("header mismatch at column {index}: expected `{expected}`, found `{found}`")]
    HeaderMismatch {
        index: usize,
        expected: String,
        found: String,
    },

    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    NonNumeric { row: usize, column: String, value: String },

    #[error("row {row}, column `{column}`: missing value")]
    MissingValue { row: usize, column: String },

    #[error("row {row}, column `{column}`: value {value} outside valid range [{lo}, {hi}]")]
    OutOfRange {
        row: usize,
        column: String,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("row {row}: label {value} is not 0 or 1")]
    InvalidLabel { row: usize, value: f64 },

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("dataset is already normalized")]
    AlreadyNormalized,

    #[error("dataset must be normalized first")]
    NotNormalized,

    #[error("feature index {index} out of bounds for {count} features")]
    FeatureIndex { index: usize, count: usize },

    #[error("duplicate feature index {0}")]
    DuplicateFeature(usize),

    #[error("empty feature selection")]
    EmptySelection,

    #[error("{class} class has {available} rows, {requested} requested")]
    InsufficientClass {
        class: &'static str,
        available: usize,
        requested: usize,
    },

    #[error("training set contains a single class")]
    SingleClass,

    #[error("empty dataset")]
    EmptyDataset,

    #[error("test fraction {fraction} leaves an empty {side} set")]
    DegenerateSplit { fraction: f64, side: &'static str },

    #[error("expected {expected} features, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0} has no embedded feature importance")]
    NoImportance(String),

    #[error("need at least {needed} samples, got {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("samples have zero spread")]
    ZeroSpread,

    #[error("no convergence after {iterations} iterations (gradient norm {gradient_norm:e})")]
    NoConvergence { iterations: usize, gradient_norm: f64 },

    #[error("no candidate distribution could be fitted: {0}")]
    NoFit(String),

    #[error("serialization: {0}")]
    Serde(String),

    #[error("unsupported model format version {0}")]
    FormatVersion(u32),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True when the input data itself is malformed, as opposed to an analysis
    /// that cannot proceed on well-formed data.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Csv(_)
                | Error::HeaderMismatch { .. }
                | Error::NonNumeric { .. }
                | Error::MissingValue { .. }
                | Error::OutOfRange { .. }
                | Error::InvalidLabel { .. }
                | Error::Schema(_)
                | Error::Serde(_)
                | Error::FormatVersion(_)
                | Error::TooFewSamples { .. }
                | Error::ZeroSpread
                | Error::EmptyDataset
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
