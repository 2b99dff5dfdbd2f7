//! Before/after performance tables in aligned text and CSV.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::classifiers::ModelKind;
use crate::metrics::{ConfusionMatrix, MetricsReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceRow {
    pub model: ModelKind,
    pub before: Evaluation,
    pub after: Evaluation,
}

/// How the evaluation split was produced; recorded with every table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitInfo {
    pub strategy: String,
    pub test_fraction: f64,
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceTable {
    pub title: String,
    pub split: SplitInfo,
    pub selected_features: Vec<String>,
    pub rows: Vec<PerformanceRow>,
}

impl PerformanceTable {
    pub fn row(&self, model: ModelKind) -> Option<&PerformanceRow> {
        self.rows.iter().find(|r| r.model == model)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.title);
        let _ = writeln!(
            out,
            "split: {} test_fraction={} seed={} train={} test={}",
            self.split.strategy, self.split.test_fraction, self.split.seed, self.split.n_train, self.split.n_test
        );
        let _ = writeln!(
            out,
            "selected features ({}): {}",
            self.selected_features.len(),
            self.selected_features.join(", ")
        );
        let _ = writeln!(
            out,
            "{:<5}| {:^44} | {:^44}",
            "", "Before feature selection", "After feature selection"
        );
        let head = format!("{:>8} {:>8} {:>8} {:>8} {:>8}", "Acc", "Prec", "Recall", "Spec", "F1");
        let _ = writeln!(out, "{:<5}| {head} | {head}", "Model");
        for r in &self.rows {
            let cells = |m: &MetricsReport| {
                format!(
                    "{:>8.3} {:>8.3} {:>8.3} {:>8.3} {:>8.3}",
                    m.accuracy, m.precision, m.recall, m.specificity, m.f1
                )
            };
            let _ = writeln!(
                out,
                "{:<5}| {} | {}",
                r.model.short_name(),
                cells(&r.before.metrics),
                cells(&r.after.metrics)
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,panel,accuracy,precision,recall,specificity,f1,tp,fp,tn,fn,undefined\n");
        for r in &self.rows {
            for (panel, e) in [("before", &r.before), ("after", &r.after)] {
                let m = &e.metrics;
                let c = &e.confusion;
                let u = &m.undefined;
                let undefined: Vec<&str> = [
                    (u.precision, "precision"),
                    (u.recall, "recall"),
                    (u.specificity, "specificity"),
                    (u.f1, "f1"),
                ]
                .iter()
                .filter(|(f, _)| *f)
                .map(|(_, n)| *n)
                .collect();
                let _ = writeln!(
                    out,
                    "{},{panel},{},{},{},{},{},{},{},{},{},{}",
                    r.model.short_name(),
                    m.accuracy,
                    m.precision,
                    m.recall,
                    m.specificity,
                    m.f1,
                    c.tp,
                    c.fp,
                    c.tn,
                    c.fn_,
                    undefined.join(";")
                );
            }
        }
        out
    }
}
