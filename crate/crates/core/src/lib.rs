//! Heart-disease survey analysis.
//!
//! Loads the BRFSS heart-disease indicator survey, undersamples it to
//! balanced classes, trains seven classifiers, measures how consistently the
//! importance-capable ones rank each question over repeated resamples, and
//! fits survey-administration times to quantify how much shorter a reduced
//! questionnaire is.

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifiers;
pub mod dataset;
pub mod error;
pub mod metrics;
pub mod pipeline;
pub mod report;
pub mod rng;
pub mod sampling;
pub mod stability;
pub mod surveytime;

pub use classifiers::{top_k, train, FeatureImportance, Hyperparams, ModelKind, TrainedModel};
pub use dataset::{load_csv, synthesize, ClassCounts, Dataset, Feature, FeatureKind, FeatureSchema, SynthSpec};
pub use error::{Error, Result};
pub use metrics::{compute, confusion, ConfusionMatrix, MetricsReport};
pub use rng::SeededRng;
pub use sampling::{balanced_sample, train_test_split, SampleSpec};
pub use stability::{aggregate, reduce_dataset, run_stability, StabilityConfig, StabilityResult};
pub use surveytime::{best_fit, fit_logistic, fit_triangular, reduction_percent, TimeSamples};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
