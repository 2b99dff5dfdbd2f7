use serde::{Deserialize, Serialize};

use super::tree::{grow, BinnedMatrix, GiniStat, Tree, TreeParams};
use crate::dataset::Dataset;
use crate::rng::SeededRng;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    /// Features tried per split; `None` means `ceil(sqrt(p))`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: 8,
            max_features: None,
            bootstrap: true,
        }
    }
}

/// Bagged Gini trees. Each tree votes with its leaf majority.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Tree>,
}

impl Forest {
    /// Fraction of trees voting positive.
    pub fn score(&self, x: &[f64]) -> f64 {
        let votes = self.trees.iter().filter(|t| t.evaluate(x) >= 0.5).count();
        votes as f64 / self.trees.len() as f64
    }
}

/// Returns the forest and the total Gini decrease per feature. Tree `t` draws
/// from `rng.fork(t)`, so the result does not depend on build order.
pub(crate) fn fit(d: &Dataset, hp: &ForestParams, rng: &SeededRng) -> (Forest, Vec<f64>) {
    let p = d.n_features();
    let n = d.n_rows();
    let binned = BinnedMatrix::new(d);
    let stats: Vec<GiniStat> = d.labels().iter().map(|&l| GiniStat::of(l)).collect();
    let params = TreeParams {
        max_depth: hp.max_depth,
        max_features: Some(
            hp.max_features
                .unwrap_or_else(|| (p as f64).sqrt().ceil() as usize)
                .clamp(1, p),
        ),
    };
    let build = |t: usize| {
        let mut tree_rng = rng.fork(t as u64);
        let mut rows: Vec<usize> = if hp.bootstrap {
            (0..n).map(|_| tree_rng.gen_range(0..n)).collect()
        } else {
            (0..n).collect()
        };
        let mut gains = vec![0.0; p];
        let tree = grow(&binned, &stats, &mut rows, &params, &mut tree_rng, &mut gains);
        (tree, gains)
    };

    #[cfg(feature = "parallel")]
    let built: Vec<(Tree, Vec<f64>)> = {
        use rayon::prelude::*;
        (0..hp.n_trees).into_par_iter().map(build).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let built: Vec<(Tree, Vec<f64>)> = (0..hp.n_trees).map(build).collect();

    let mut total = vec![0.0; p];
    let mut trees = Vec::with_capacity(built.len());
    for (tree, gains) in built {
        for (t, g) in total.iter_mut().zip(&gains) {
            *t += g;
        }
        trees.push(tree);
    }
    (Forest { trees }, total)
}
