//! Linear classifiers: full-batch logistic regression, stochastic logistic
//! regression and a Pegasos-style linear SVM.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn zeros(p: usize) -> Self {
        Self {
            weights: vec![0.0; p],
            intercept: 0.0,
        }
    }

    pub fn margin(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.intercept
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogRegParams {
    pub learning_rate: f64,
    pub l2: f64,
    pub max_epochs: usize,
    pub tolerance: f64,
}

impl Default for LogRegParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            l2: 1e-3,
            max_epochs: 500,
            tolerance: 1e-6,
        }
    }
}

impl LogRegParams {
    /// Stock settings for the per-sample variant.
    pub fn sgd_default() -> Self {
        Self {
            learning_rate: 0.05,
            max_epochs: 50,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmParams {
    pub l2: f64,
    pub max_epochs: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            l2: 1e-3,
            max_epochs: 500,
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Log-loss of one example at margin `z`: `log(1 + e^z) - y z`.
pub fn log_loss(z: f64, y: f64) -> f64 {
    softplus(z) - y * z
}

/// Value and gradient of the L2-regularised mean log-loss
/// `(1/n) sum_i log_loss(w.x_i + b, y_i) + (l2/2) |w|^2`.
/// The intercept is not penalised. Returns `(loss, grad_w, grad_b)`.
pub fn logistic_objective(d: &Dataset, model: &LinearModel, l2: f64) -> (f64, Vec<f64>, f64) {
    let p = d.n_features();
    let mut grad = vec![0.0; p];
    let mut grad_b = 0.0;
    let mut loss = 0.0;
    for (x, &y) in d.rows().zip(d.labels()) {
        let z = model.margin(x);
        let y = y as f64;
        loss += log_loss(z, y);
        let r = sigmoid(z) - y;
        for (g, xi) in grad.iter_mut().zip(x) {
            *g += r * xi;
        }
        grad_b += r;
    }
    let n = d.n_rows().max(1) as f64;
    let mut penalty = 0.0;
    for (g, w) in grad.iter_mut().zip(&model.weights) {
        *g = *g / n + l2 * w;
        penalty += w * w;
    }
    (loss / n + 0.5 * l2 * penalty, grad, grad_b / n)
}

/// Value and gradient of the single-example objective used by the stochastic
/// trainer: `log_loss(w.x + b, y) + (l2/2) |w|^2`.
pub fn logistic_sample_objective(x: &[f64], y: f64, model: &LinearModel, l2: f64) -> (f64, Vec<f64>, f64) {
    let z = model.margin(x);
    let r = sigmoid(z) - y;
    let grad = x.iter().zip(&model.weights).map(|(xi, w)| r * xi + l2 * w).collect();
    let penalty: f64 = model.weights.iter().map(|w| w * w).sum();
    (log_loss(z, y) + 0.5 * l2 * penalty, grad, r)
}

/// Full-batch gradient descent; stops once the gradient's Euclidean norm
/// drops below the tolerance.
pub(crate) fn fit_logreg(d: &Dataset, hp: &LogRegParams) -> Result<LinearModel> {
    let mut model = LinearModel::zeros(d.n_features());
    for epoch in 0..hp.max_epochs {
        let (loss, grad, grad_b) = logistic_objective(d, &model, hp.l2);
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        let norm = (grad.iter().map(|g| g * g).sum::<f64>() + grad_b * grad_b).sqrt();
        if norm < hp.tolerance {
            break;
        }
        for (w, g) in model.weights.iter_mut().zip(&grad) {
            *w -= hp.learning_rate * g;
        }
        model.intercept -= hp.learning_rate * grad_b;
    }
    Ok(model)
}

/// Per-example SGD with step `lr / sqrt(t)`, reshuffling every epoch; stops
/// when the epoch-to-epoch change of the full objective is below tolerance.
pub(crate) fn fit_sgd_logreg(d: &Dataset, hp: &LogRegParams, rng: &mut SeededRng) -> Result<LinearModel> {
    let mut model = LinearModel::zeros(d.n_features());
    let mut order: Vec<usize> = (0..d.n_rows()).collect();
    let mut t = 0usize;
    let mut previous = f64::INFINITY;
    for epoch in 0..hp.max_epochs {
        order.shuffle(rng);
        for &i in &order {
            t += 1;
            let step = hp.learning_rate / (t as f64).sqrt();
            let x = d.row(i);
            let r = sigmoid(model.margin(x)) - d.labels()[i] as f64;
            for (w, xi) in model.weights.iter_mut().zip(x) {
                *w -= step * (r * xi + hp.l2 * *w);
            }
            model.intercept -= step * r;
        }
        let (loss, _, _) = logistic_objective(d, &model, hp.l2);
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        if (previous - loss).abs() < hp.tolerance {
            break;
        }
        previous = loss;
    }
    Ok(model)
}

/// Pegasos: one random example per step, step size `1 / (l2 t)`, projection
/// onto the ball of radius `1 / sqrt(l2)`. The bias rides along as a
/// constant feature, so it is regularised with the weights.
pub(crate) fn fit_svm(d: &Dataset, hp: &SvmParams, rng: &mut SeededRng) -> Result<LinearModel> {
    if !(hp.l2 > 0.0) {
        return Err(Error::InvalidParameter("SVM regularisation must be positive".into()));
    }
    let p = d.n_features();
    let n = d.n_rows();
    let mut w = vec![0.0; p + 1];
    let radius = 1.0 / hp.l2.sqrt();
    let mut t = 0usize;
    for epoch in 0..hp.max_epochs {
        for _ in 0..n {
            t += 1;
            let i = rng.gen_range(0..n);
            let x = d.row(i);
            let y = if d.labels()[i] == 1 { 1.0 } else { -1.0 };
            let eta = 1.0 / (hp.l2 * t as f64);
            let margin = y * (dot(&w[..p], x) + w[p]);
            let shrink = 1.0 - eta * hp.l2;
            for wi in w.iter_mut() {
                *wi *= shrink;
            }
            if margin < 1.0 {
                for (wi, xi) in w.iter_mut().zip(x) {
                    *wi += eta * y * xi;
                }
                w[p] += eta * y;
            }
            let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > radius {
                let s = radius / norm;
                for wi in w.iter_mut() {
                    *wi *= s;
                }
            }
        }
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteLoss { epoch });
        }
    }
    let intercept = w.pop().unwrap_or(0.0);
    Ok(LinearModel { weights: w, intercept })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_is_stable_and_symmetric() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(800.0) <= 1.0);
        for z in [-5.0, -0.3, 2.0, 30.0] {
            assert!((sigmoid(z) + sigmoid(-z) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn log_loss_matches_naive_form() {
        for &(z, y) in &[(0.3f64, 1.0f64), (-2.0, 0.0), (4.0, 0.0), (-1.5, 1.0)] {
            let p = 1.0 / (1.0 + (-z).exp());
            let naive = -(y * p.ln() + (1.0 - y) * (1.0 - p).ln());
            assert!((log_loss(z, y) - naive).abs() < 1e-12);
        }
        assert!(log_loss(1000.0, 0.0).is_finite());
    }
}
