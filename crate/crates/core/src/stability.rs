//! Repeated-resampling stability of embedded feature selection.
//!
//! Each iteration draws one balanced sample (shared by every model), trains
//! each selector on it and records the model's top-k features. Iteration `i`
//! uses seed `mix_seed(master_seed, i)` and model `m` forks that stream with
//! the model's fixed index, so results are independent of scheduling.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::classifiers::{top_k, train, Hyperparams, ModelKind};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{mix_seed, SeededRng};
use crate::sampling::{balanced_sample, SampleSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StabilityConfig {
    pub iterations: usize,
    pub n_per_class: usize,
    pub k_select: usize,
    pub models: Vec<ModelKind>,
    pub master_seed: u64,
    pub hyperparams: Hyperparams,
    /// Worker threads; `None` uses the global pool. Does not affect results.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            iterations: 300,
            n_per_class: 1000,
            k_select: 10,
            models: ModelKind::SELECTORS.to_vec(),
            master_seed: 0,
            hyperparams: Hyperparams::default(),
            workers: None,
        }
    }
}

impl StabilityConfig {
    fn validate(&self, n_features: usize) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("iterations must be at least 1".into()));
        }
        if self.k_select == 0 || self.k_select > n_features {
            return Err(Error::InvalidParameter(format!(
                "k_select = {} not in [1, {n_features}]",
                self.k_select
            )));
        }
        if self.models.is_empty() {
            return Err(Error::InvalidParameter("model set is empty".into()));
        }
        if let Some(k) = self.models.iter().find(|k| !k.has_importance()) {
            return Err(Error::NoImportance(k.to_string()));
        }
        let mut sorted = self.models.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.models.len() {
            return Err(Error::InvalidParameter("model set has duplicates".into()));
        }
        self.hyperparams.validate()
    }
}

/// How often each feature landed in each model's top-k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionFrequencyTable {
    pub models: Vec<ModelKind>,
    pub feature_names: Vec<String>,
    pub iterations: usize,
    pub k_select: usize,
    /// `counts[m][f]`: iterations in which model `m` selected feature `f`.
    pub counts: Vec<Vec<usize>>,
}

impl SelectionFrequencyTable {
    pub fn frequency(&self, model: usize, feature: usize) -> f64 {
        self.counts[model][feature] as f64 / self.iterations as f64
    }

    pub fn frequencies(&self, model: usize) -> Vec<f64> {
        (0..self.feature_names.len())
            .map(|f| self.frequency(model, f))
            .collect()
    }

    pub fn mean_frequency(&self, feature: usize) -> f64 {
        let total: usize = self.counts.iter().map(|c| c[feature]).sum();
        total as f64 / (self.iterations * self.models.len()) as f64
    }

    /// Every model selected exactly `k_select` features per iteration.
    pub fn counting_identity_holds(&self) -> bool {
        self.counts
            .iter()
            .all(|c| c.iter().sum::<usize>() == self.k_select * self.iterations)
    }

    /// `model,<feature>...` header, one row of frequencies per model.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model");
        for name in &self.feature_names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (m, kind) in self.models.iter().enumerate() {
            out.push_str(kind.short_name());
            for f in 0..self.feature_names.len() {
                let _ = write!(out, ",{}", self.frequency(m, f));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub seed: u64,
    /// Top-k feature indices per model, in `models` order.
    pub selections: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityResult {
    pub table: SelectionFrequencyTable,
    /// All features, by descending mean selection frequency.
    pub consensus: Vec<usize>,
    /// First `k_select` entries of the consensus.
    pub top_stable: Vec<usize>,
    pub iterations: Vec<IterationRecord>,
}

impl StabilityResult {
    pub fn top_stable_names(&self) -> Vec<&str> {
        self.top_stable
            .iter()
            .map(|&f| self.table.feature_names[f].as_str())
            .collect()
    }

    /// `rank,index,feature,mean_frequency`, one row per feature.
    pub fn consensus_csv(&self) -> String {
        let mut out = String::from("rank,index,feature,mean_frequency\n");
        for (rank, &f) in self.consensus.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                rank + 1,
                f,
                self.table.feature_names[f],
                self.table.mean_frequency(f)
            );
        }
        out
    }
}

/// Seed of iteration `i`.
pub fn iteration_seed(master_seed: u64, i: usize) -> u64 {
    mix_seed(master_seed, i as u64)
}

fn model_slot(kind: ModelKind) -> u64 {
    ModelKind::ALL.iter().position(|&k| k == kind).unwrap_or(0) as u64
}

fn run_iteration(d: &Dataset, cfg: &StabilityConfig, i: usize) -> Result<IterationRecord> {
    let seed = iteration_seed(cfg.master_seed, i);
    let sample = balanced_sample(
        d,
        SampleSpec {
            n_per_class: cfg.n_per_class,
            seed,
        },
    )?;
    let base = SeededRng::new(seed);
    let mut selections = Vec::with_capacity(cfg.models.len());
    for &kind in &cfg.models {
        let model = train(kind, &sample, &cfg.hyperparams, &base.fork(model_slot(kind)))?;
        let imp = model
            .importance()
            .ok_or_else(|| Error::NoImportance(kind.to_string()))?;
        selections.push(top_k(&imp, cfg.k_select)?);
    }
    Ok(IterationRecord {
        iteration: i,
        seed,
        selections,
    })
}

fn run_all(d: &Dataset, cfg: &StabilityConfig) -> Result<Vec<IterationRecord>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let job = || {
            (0..cfg.iterations)
                .into_par_iter()
                .map(|i| run_iteration(d, cfg, i))
                .collect::<Result<Vec<_>>>()
        };
        match cfg.workers {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameter(e.to_string()))?
                .install(job),
            None => job(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..cfg.iterations).map(|i| run_iteration(d, cfg, i)).collect()
    }
}

/// Runs the full protocol on a normalized dataset.
pub fn run_stability(d: &Dataset, cfg: &StabilityConfig) -> Result<StabilityResult> {
    if !d.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let p = d.n_features();
    cfg.validate(p)?;
    let counts = d.class_counts();
    for (class, available) in [("negative", counts.negatives), ("positive", counts.positives)] {
        if available < cfg.n_per_class {
            return Err(Error::InsufficientClass {
                class,
                available,
                requested: cfg.n_per_class,
            });
        }
    }

    // collected in iteration order whatever the schedule
    let records = run_all(d, cfg)?;
    let mut table = SelectionFrequencyTable {
        models: cfg.models.clone(),
        feature_names: d.schema().names().iter().map(|s| s.to_string()).collect(),
        iterations: cfg.iterations,
        k_select: cfg.k_select,
        counts: vec![vec![0; p]; cfg.models.len()],
    };
    for rec in &records {
        for (m, sel) in rec.selections.iter().enumerate() {
            for &f in sel {
                table.counts[m][f] += 1;
            }
        }
    }
    let consensus = aggregate(&table);
    let top_stable = consensus[..cfg.k_select].to_vec();
    Ok(StabilityResult {
        table,
        consensus,
        top_stable,
        iterations: records,
    })
}

/// Features ordered by unweighted mean selection frequency across models,
/// descending; equal means keep ascending feature index.
pub fn aggregate(table: &SelectionFrequencyTable) -> Vec<usize> {
    let p = table.feature_names.len();
    // every model shares the iteration count, so summed counts rank exactly
    let totals: Vec<usize> = (0..p).map(|f| table.counts.iter().map(|c| c[f]).sum()).collect();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| totals[b].cmp(&totals[a]).then(a.cmp(&b)));
    order
}

/// Keeps only the selected columns.
pub fn reduce_dataset(d: &Dataset, selected: &[usize]) -> Result<Dataset> {
    d.select_features(selected)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(counts: Vec<Vec<usize>>, iterations: usize) -> SelectionFrequencyTable {
        let p = counts[0].len();
        SelectionFrequencyTable {
            models: ModelKind::SELECTORS[..counts.len()].to_vec(),
            feature_names: (0..p).map(|j| format!("q{j}")).collect(),
            iterations,
            k_select: 1,
            counts,
        }
    }

    #[test]
    fn aggregate_tie_uses_index() {
        let t = table(vec![vec![1, 0], vec![0, 1]], 1);
        assert_eq!(aggregate(&t), vec![0, 1]);
        assert_eq!(t.mean_frequency(0), 0.5);
    }

    #[test]
    fn aggregate_single_model_is_identity() {
        let t = table(vec![vec![2, 9, 5, 0]], 10);
        assert_eq!(aggregate(&t), vec![1, 2, 0, 3]);
    }

    #[test]
    fn aggregate_dominant_feature_first() {
        let t = table(vec![vec![3, 0, 10], vec![0, 4, 10], vec![7, 1, 10]], 10);
        assert_eq!(aggregate(&t)[0], 2);
    }

    #[test]
    fn csv_layout() {
        let t = table(vec![vec![1, 3]], 4);
        assert_eq!(t.to_csv(), "model,q0,q1\nLR,0.25,0.75\n");
    }

    #[test]
    fn config_rejects_incapable_models() {
        let cfg = StabilityConfig {
            models: vec![ModelKind::LogReg, ModelKind::Knn],
            ..Default::default()
        };
        assert!(matches!(cfg.validate(21), Err(Error::NoImportance(_))));
        let cfg = StabilityConfig {
            k_select: 22,
            ..Default::default()
        };
        assert!(cfg.validate(21).is_err());
    }
}
