//! Confusion matrices and the five performance measures. The positive class
//! is label 1 (heart disease or attack).

use serde::{Deserialize, Serialize};

use crate::classifiers::TrainedModel;
use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn new(tp: usize, fp: usize, tn: usize, fn_: usize) -> Self {
        Self { tp, fp, tn, fn_ }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn record(&mut self, actual: u8, predicted: u8) {
        match (actual, predicted) {
            (1, 1) => self.tp += 1,
            (0, 1) => self.fp += 1,
            (0, _) => self.tn += 1,
            _ => self.fn_ += 1,
        }
    }

    pub fn from_labels(actual: &[u8], predicted: &[u8]) -> Result<Self> {
        if actual.len() != predicted.len() {
            return Err(Error::DimensionMismatch {
                expected: actual.len(),
                found: predicted.len(),
            });
        }
        let mut c = Self::default();
        for (&a, &p) in actual.iter().zip(predicted) {
            c.record(a, p);
        }
        Ok(c)
    }
}

/// Which ratios had a zero denominator and were reported as 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Undefined {
    pub precision: bool,
    pub recall: bool,
    pub specificity: bool,
    pub f1: bool,
}

impl Undefined {
    pub fn any(&self) -> bool {
        self.precision || self.recall || self.specificity || self.f1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub specificity: f64,
    pub f1: f64,
    pub undefined: Undefined,
}

fn ratio(num: usize, den: usize, flag: &mut bool) -> f64 {
    if den == 0 {
        *flag = true;
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Accuracy, precision, recall, specificity and F1 of a confusion matrix.
/// A ratio with a zero denominator is 0 and flagged in `undefined`.
pub fn compute(c: &ConfusionMatrix) -> Result<MetricsReport> {
    if c.total() == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut u = Undefined::default();
    let accuracy = (c.tp + c.tn) as f64 / c.total() as f64;
    let precision = ratio(c.tp, c.tp + c.fp, &mut u.precision);
    let recall = ratio(c.tp, c.tp + c.fn_, &mut u.recall);
    let specificity = ratio(c.tn, c.tn + c.fp, &mut u.specificity);
    let f1 = if u.precision || u.recall || precision + recall == 0.0 {
        u.f1 = true;
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(MetricsReport {
        accuracy,
        precision,
        recall,
        specificity,
        f1,
        undefined: u,
    })
}

/// Tallies the model's predictions over every row of `test`.
pub fn confusion(m: &TrainedModel, test: &Dataset) -> Result<ConfusionMatrix> {
    let predicted = m.predict_labels(test)?;
    ConfusionMatrix::from_labels(test.labels(), &predicted)
}

/// Confusion matrix and metrics in one call.
pub fn evaluate(m: &TrainedModel, test: &Dataset) -> Result<(ConfusionMatrix, MetricsReport)> {
    let c = confusion(m, test)?;
    Ok((c, compute(&c)?))
}
