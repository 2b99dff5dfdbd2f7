use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distance {
    Euclidean,
    Manhattan,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnParams {
    pub k: usize,
    pub metric: Distance,
}

impl Default for KnnParams {
    fn default() -> Self {
        Self {
            k: 5,
            metric: Distance::Euclidean,
        }
    }
}

/// Stored training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub metric: Distance,
    pub n_features: usize,
    pub points: Vec<f64>,
    pub labels: Vec<u8>,
}

impl KnnModel {
    pub(crate) fn fit(d: &Dataset, hp: &KnnParams) -> Self {
        Self {
            k: hp.k,
            metric: hp.metric,
            n_features: d.n_features(),
            points: d.values().to_vec(),
            labels: d.labels().to_vec(),
        }
    }

    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.metric {
            // squared distance ranks identically
            Distance::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum(),
            Distance::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        }
    }

    /// Fraction of positive labels among the `k` nearest stored points.
    /// Equal distances favour the lower stored index.
    pub fn score(&self, x: &[f64]) -> f64 {
        let n = self.labels.len();
        let k = self.k.min(n);
        if k == 0 {
            return 0.5;
        }
        let mut d: Vec<(f64, usize)> = self
            .points
            .chunks_exact(self.n_features)
            .map(|p| self.distance(p, x))
            .zip(0..)
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| -> Ordering { a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)) };
        if k < n {
            d.select_nth_unstable_by(k - 1, cmp);
        }
        let votes = d[..k].iter().filter(|&&(_, i)| self.labels[i] == 1).count();
        votes as f64 / k as f64
    }
}
