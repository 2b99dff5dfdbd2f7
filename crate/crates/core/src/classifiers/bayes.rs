use serde::{Deserialize, Serialize};

use super::linear::sigmoid;
use crate::dataset::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BayesParams {
    /// Added to every variance, as a fraction of the largest feature variance.
    pub var_smoothing: f64,
}

impl Default for BayesParams {
    fn default() -> Self {
        Self { var_smoothing: 1e-9 }
    }
}

/// Per-class independent Gaussians; index 0 is the negative class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    pub log_priors: [f64; 2],
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
}

fn mean_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var)
}

impl GaussianNb {
    pub(crate) fn fit(d: &Dataset, hp: &BayesParams) -> Self {
        let p = d.n_features();
        let max_var = (0..p)
            .map(|j| mean_var(&d.column(j).collect::<Vec<_>>()).1)
            .fold(0.0, f64::max);
        let epsilon = if max_var > 0.0 {
            hp.var_smoothing * max_var
        } else {
            hp.var_smoothing
        }
        .max(f64::MIN_POSITIVE);
        let counts = d.class_counts();
        let n = d.n_rows() as f64;
        let mut means = [Vec::with_capacity(p), Vec::with_capacity(p)];
        let mut variances = [Vec::with_capacity(p), Vec::with_capacity(p)];
        for class in 0..2u8 {
            for j in 0..p {
                let col: Vec<f64> = d
                    .rows()
                    .zip(d.labels())
                    .filter(|(_, &y)| y == class)
                    .map(|(r, _)| r[j])
                    .collect();
                let (m, v) = mean_var(&col);
                means[class as usize].push(m);
                variances[class as usize].push(v + epsilon);
            }
        }
        Self {
            log_priors: [(counts.negatives as f64 / n).ln(), (counts.positives as f64 / n).ln()],
            means,
            variances,
        }
    }

    fn joint_log_likelihood(&self, class: usize, x: &[f64]) -> f64 {
        let mut ll = self.log_priors[class];
        for ((&xi, &m), &v) in x.iter().zip(&self.means[class]).zip(&self.variances[class]) {
            ll -= 0.5 * ((2.0 * std::f64::consts::PI * v).ln() + (xi - m) * (xi - m) / v);
        }
        ll
    }

    /// Posterior probability of the positive class.
    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.joint_log_likelihood(1, x) - self.joint_log_likelihood(0, x))
    }
}
