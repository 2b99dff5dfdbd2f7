//! End-to-end experiments: train every model on a split, evaluate, then
//! retrain on a feature subset and evaluate again.

use serde::{Deserialize, Serialize};

use crate::classifiers::{train, Hyperparams, ModelKind};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metrics::evaluate;
use crate::report::{Evaluation, PerformanceRow, PerformanceTable, SplitInfo};
use crate::rng::SeededRng;
use crate::sampling::{balanced_sample, split_indices, SampleSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub title: String,
    pub models: Vec<ModelKind>,
    pub hyperparams: Hyperparams,
    pub test_fraction: f64,
    /// Seeds the split and every model's training stream.
    pub seed: u64,
    /// Feature indices kept for the "after" panel.
    pub selected: Vec<usize>,
}

fn model_rng(seed: u64, kind: ModelKind) -> SeededRng {
    let slot = ModelKind::ALL.iter().position(|&k| k == kind).unwrap_or(0) as u64;
    SeededRng::new(seed).fork(1000 + slot)
}

/// Splits raw data, scales with training-set ranges and evaluates each model
/// on all features and on `spec.selected`.
pub fn run_experiment(raw: &Dataset, spec: &ExperimentSpec) -> Result<PerformanceTable> {
    if raw.is_normalized() {
        return Err(Error::AlreadyNormalized);
    }
    let (train_rows, test_rows) = split_indices(raw, spec.test_fraction, spec.seed)?;
    let train_set = raw.subset(&train_rows).normalize()?;
    let scaler = train_set.scaler().expect("normalized");
    let test_set = scaler.transform(&raw.subset(&test_rows))?;
    let train_sel = train_set.select_features(&spec.selected)?;
    let test_sel = test_set.select_features(&spec.selected)?;

    let mut rows = Vec::with_capacity(spec.models.len());
    for &kind in &spec.models {
        let rng = model_rng(spec.seed, kind);
        let full = train(kind, &train_set, &spec.hyperparams, &rng)?;
        let (confusion, metrics) = evaluate(&full, &test_set)?;
        let reduced = train(kind, &train_sel, &spec.hyperparams, &rng)?;
        let (c2, m2) = evaluate(&reduced, &test_sel)?;
        rows.push(PerformanceRow {
            model: kind,
            before: Evaluation { confusion, metrics },
            after: Evaluation {
                confusion: c2,
                metrics: m2,
            },
        });
    }
    Ok(PerformanceTable {
        title: spec.title.clone(),
        split: SplitInfo {
            strategy: "stratified single split".into(),
            test_fraction: spec.test_fraction,
            seed: spec.seed,
            n_train: train_rows.len(),
            n_test: test_rows.len(),
        },
        selected_features: spec
            .selected
            .iter()
            .map(|&j| raw.schema().features()[j].name.clone())
            .collect(),
        rows,
    })
}

/// Balanced undersampling first, then [`run_experiment`] on the sample.
pub fn run_balanced_experiment(raw: &Dataset, sample: SampleSpec, spec: &ExperimentSpec) -> Result<PerformanceTable> {
    let balanced = balanced_sample(raw, sample)?;
    run_experiment(&balanced, spec)
}
