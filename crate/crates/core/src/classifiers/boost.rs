use serde::{Deserialize, Serialize};

use super::linear::sigmoid;
use super::tree::{grow, BinnedMatrix, GradStat, Tree, TreeParams};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostParams {
    pub rounds: usize,
    pub shrinkage: f64,
    pub max_depth: usize,
}

impl Default for BoostParams {
    fn default() -> Self {
        Self {
            rounds: 100,
            shrinkage: 0.1,
            max_depth: 3,
        }
    }
}

/// Additive log-odds model: `base + shrinkage * sum_t tree_t(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Boosted {
    pub base: f64,
    pub shrinkage: f64,
    pub trees: Vec<Tree>,
}

impl Boosted {
    pub fn log_odds(&self, x: &[f64]) -> f64 {
        self.base + self.shrinkage * self.trees.iter().map(|t| t.evaluate(x)).sum::<f64>()
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.log_odds(x))
    }
}

/// Each round fits a regression tree to the log-loss gradients `y - p`
/// (split criterion: squared-error reduction) with Newton leaf values.
/// Returns the model and the total squared-error reduction per feature.
pub(crate) fn fit(d: &Dataset, hp: &BoostParams, rng: &mut SeededRng) -> Result<(Boosted, Vec<f64>)> {
    let n = d.n_rows();
    let p = d.n_features();
    let pos = d.class_counts().positives as f64 / n as f64;
    let base = (pos / (1.0 - pos)).ln();
    let binned = BinnedMatrix::new(d);
    let params = TreeParams {
        max_depth: hp.max_depth,
        max_features: None,
    };
    let mut f = vec![base; n];
    let mut gains = vec![0.0; p];
    let mut trees = Vec::with_capacity(hp.rounds);
    let mut rows: Vec<usize> = (0..n).collect();
    for round in 0..hp.rounds {
        let stats: Vec<GradStat> = f
            .iter()
            .zip(d.labels())
            .map(|(&fi, &y)| {
                let prob = sigmoid(fi);
                GradStat::new(y as f64 - prob, prob * (1.0 - prob))
            })
            .collect();
        rows.sort_unstable();
        let tree = grow(&binned, &stats, &mut rows, &params, rng, &mut gains);
        for (fi, x) in f.iter_mut().zip(d.rows()) {
            *fi += hp.shrinkage * tree.evaluate(x);
        }
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteLoss { epoch: round });
        }
        trees.push(tree);
    }
    Ok((
        Boosted {
            base,
            shrinkage: hp.shrinkage,
            trees,
        },
        gains,
    ))
}
