//! The seven classifiers behind one train / predict / importance contract.
//!
//! Five kinds expose embedded feature importance: the three linear models
//! (absolute coefficients), the random forest (Gini decrease) and gradient
//! boosting (squared-error reduction of its gradient trees). KNN and
//! Gaussian naive Bayes only predict.

mod bayes;
mod boost;
mod forest;
mod knn;
pub mod linear;
pub mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

pub use bayes::{BayesParams, GaussianNb};
pub use boost::{BoostParams, Boosted};
pub use forest::{Forest, ForestParams};
pub use knn::{Distance, KnnModel, KnnParams};
pub use linear::{LinearModel, LogRegParams, SvmParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelKind {
    LogReg,
    LinearSvm,
    SgdLogReg,
    RandomForest,
    GradBoost,
    Knn,
    GaussianNb,
}

impl ModelKind {
    pub const ALL: [ModelKind; 7] = [
        ModelKind::LogReg,
        ModelKind::LinearSvm,
        ModelKind::SgdLogReg,
        ModelKind::RandomForest,
        ModelKind::GradBoost,
        ModelKind::Knn,
        ModelKind::GaussianNb,
    ];

    /// Kinds with embedded feature importance.
    pub const SELECTORS: [ModelKind; 5] = [
        ModelKind::LogReg,
        ModelKind::LinearSvm,
        ModelKind::SgdLogReg,
        ModelKind::RandomForest,
        ModelKind::GradBoost,
    ];

    pub fn has_importance(self) -> bool {
        !matches!(self, ModelKind::Knn | ModelKind::GaussianNb)
    }

    /// Short table label.
    pub fn short_name(self) -> &'static str {
        match self {
            ModelKind::LogReg => "LR",
            ModelKind::LinearSvm => "SVM",
            ModelKind::SgdLogReg => "SGD",
            ModelKind::RandomForest => "RF",
            ModelKind::GradBoost => "GB",
            ModelKind::Knn => "KNN",
            ModelKind::GaussianNb => "GNB",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s.to_ascii_lowercase().as_str() {
            "lr" | "logreg" => ModelKind::LogReg,
            "svm" | "linearsvm" => ModelKind::LinearSvm,
            "sgd" | "sgdlogreg" => ModelKind::SgdLogReg,
            "rf" | "randomforest" => ModelKind::RandomForest,
            "gb" | "gradboost" => ModelKind::GradBoost,
            "knn" => ModelKind::Knn,
            "gnb" | "gaussiannb" => ModelKind::GaussianNb,
            other => return Err(Error::InvalidParameter(format!("unknown model `{other}`"))),
        };
        Ok(kind)
    }
}

/// Training knobs for every kind. Defaults are the stock configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparams {
    pub logreg: LogRegParams,
    #[serde(deserialize_with = "sgd_with_defaults")]
    pub sgd: LogRegParams,
    pub svm: SvmParams,
    pub forest: ForestParams,
    pub boost: BoostParams,
    pub knn: KnnParams,
    pub bayes: BayesParams,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            logreg: LogRegParams::default(),
            sgd: LogRegParams::sgd_default(),
            svm: SvmParams::default(),
            forest: ForestParams::default(),
            boost: BoostParams::default(),
            knn: KnnParams::default(),
            bayes: BayesParams::default(),
        }
    }
}

/// Missing SGD fields fall back to the SGD defaults, not the batch ones.
fn sgd_with_defaults<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<LogRegParams, D::Error> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Partial {
        learning_rate: Option<f64>,
        l2: Option<f64>,
        max_epochs: Option<usize>,
        tolerance: Option<f64>,
    }
    let p = Partial::deserialize(d)?;
    let base = LogRegParams::sgd_default();
    Ok(LogRegParams {
        learning_rate: p.learning_rate.unwrap_or(base.learning_rate),
        l2: p.l2.unwrap_or(base.l2),
        max_epochs: p.max_epochs.unwrap_or(base.max_epochs),
        tolerance: p.tolerance.unwrap_or(base.tolerance),
    })
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        for (name, lin) in [("logreg", &self.logreg), ("sgd", &self.sgd)] {
            if lin.max_epochs == 0 {
                return bad(&format!("{name}: max_epochs must be positive"));
            }
            if !(lin.learning_rate >= 0.0 && lin.l2 >= 0.0 && lin.tolerance >= 0.0) {
                return bad(&format!("{name}: rates must be nonnegative"));
            }
        }
        if self.svm.max_epochs == 0 || !(self.svm.l2 > 0.0) {
            return bad("svm: max_epochs and l2 must be positive");
        }
        if self.forest.n_trees == 0 || self.forest.max_depth == 0 || self.forest.max_features == Some(0) {
            return bad("forest: counts must be positive");
        }
        if self.boost.rounds == 0 || self.boost.max_depth == 0 || !(self.boost.shrinkage >= 0.0) {
            return bad("boost: rounds and depth must be positive");
        }
        if self.knn.k == 0 {
            return bad("knn: k must be positive");
        }
        if !(self.bayes.var_smoothing >= 0.0) {
            return bad("bayes: var_smoothing must be nonnegative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelParams {
    Linear(LinearModel),
    Forest(Forest),
    Boosted(Boosted),
    Knn(KnnModel),
    Bayes(GaussianNb),
}

/// Normalised nonnegative per-feature weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    weights: Vec<f64>,
}

impl FeatureImportance {
    /// Normalises raw nonnegative scores. An all-zero vector becomes uniform.
    pub fn from_raw(raw: &[f64]) -> Self {
        let total: f64 = raw.iter().map(|v| v.abs()).sum();
        let weights = if total > 0.0 && total.is_finite() {
            raw.iter().map(|v| v.abs() / total).collect()
        } else {
            vec![1.0 / raw.len() as f64; raw.len()]
        };
        Self { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// A fitted classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    kind: ModelKind,
    feature_names: Vec<String>,
    params: ModelParams,
    /// Raw split gains for tree ensembles; unused for other kinds.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    split_gains: Vec<f64>,
}

/// Prediction threshold: a score of exactly 0.5 is labelled positive.
pub const THRESHOLD: f64 = 0.5;

impl TrainedModel {
    /// Wraps explicit linear coefficients as a model of a linear kind.
    pub fn from_linear(kind: ModelKind, feature_names: Vec<String>, model: LinearModel) -> Result<Self> {
        if !matches!(kind, ModelKind::LogReg | ModelKind::LinearSvm | ModelKind::SgdLogReg) {
            return Err(Error::InvalidParameter(format!("{kind} is not a linear model")));
        }
        if model.weights.len() != feature_names.len() {
            return Err(Error::DimensionMismatch {
                expected: feature_names.len(),
                found: model.weights.len(),
            });
        }
        Ok(Self {
            kind,
            feature_names,
            params: ModelParams::Linear(model),
            split_gains: Vec::new(),
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Continuous score in [0, 1].
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                found: x.len(),
            });
        }
        let s = match &self.params {
            ModelParams::Linear(m) => linear::sigmoid(m.margin(x)),
            ModelParams::Forest(f) => f.score(x),
            ModelParams::Boosted(b) => b.score(x),
            ModelParams::Knn(k) => k.score(x),
            ModelParams::Bayes(g) => g.score(x),
        };
        Ok(s)
    }

    /// `(label, score)` with `label = 1` iff `score >= 0.5`.
    pub fn predict(&self, x: &[f64]) -> Result<(u8, f64)> {
        let s = self.score(x)?;
        Ok((u8::from(s >= THRESHOLD), s))
    }

    /// Labels for every row of a dataset.
    pub fn predict_labels(&self, d: &Dataset) -> Result<Vec<u8>> {
        if d.n_features() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                found: d.n_features(),
            });
        }
        let rows: Vec<&[f64]> = d.rows().collect();
        #[cfg(feature = "parallel")]
        let labels = {
            use rayon::prelude::*;
            rows.par_iter().map(|x| self.predict(x).map(|(l, _)| l)).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let labels = rows.iter().map(|x| self.predict(x).map(|(l, _)| l)).collect();
        labels
    }

    /// Embedded importance, or `None` for KNN and naive Bayes.
    pub fn importance(&self) -> Option<FeatureImportance> {
        match &self.params {
            ModelParams::Linear(m) => Some(FeatureImportance::from_raw(&m.weights)),
            ModelParams::Forest(_) | ModelParams::Boosted(_) => Some(FeatureImportance::from_raw(&self.split_gains)),
            ModelParams::Knn(_) | ModelParams::Bayes(_) => None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_FORMAT_VERSION,
            model: self.clone(),
        })
        .expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            format: String,
            version: u32,
        }
        let header: Header = serde_json::from_str(text).map_err(|e| Error::Serde(e.to_string()))?;
        if header.format != MODEL_FORMAT {
            return Err(Error::Serde(format!("not a model file: format `{}`", header.format)));
        }
        if header.version != MODEL_FORMAT_VERSION {
            return Err(Error::FormatVersion(header.version));
        }
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Serde(e.to_string()))?;
        Ok(file.model)
    }
}

const MODEL_FORMAT: &str = "hdsurvey-model";
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    model: TrainedModel,
}

/// Fits a model. Deterministic in `(train, hp, rng seed)`.
pub fn train(kind: ModelKind, train: &Dataset, hp: &Hyperparams, rng: &SeededRng) -> Result<TrainedModel> {
    if !train.is_normalized() {
        return Err(Error::NotNormalized);
    }
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let counts = train.class_counts();
    if counts.negatives == 0 || counts.positives == 0 {
        return Err(Error::SingleClass);
    }
    hp.validate()?;
    let mut rng = rng.clone();
    let mut split_gains = Vec::new();
    let params = match kind {
        ModelKind::LogReg => ModelParams::Linear(linear::fit_logreg(train, &hp.logreg)?),
        ModelKind::SgdLogReg => ModelParams::Linear(linear::fit_sgd_logreg(train, &hp.sgd, &mut rng)?),
        ModelKind::LinearSvm => ModelParams::Linear(linear::fit_svm(train, &hp.svm, &mut rng)?),
        ModelKind::RandomForest => {
            let (forest, gains) = forest::fit(train, &hp.forest, &rng);
            split_gains = gains;
            ModelParams::Forest(forest)
        }
        ModelKind::GradBoost => {
            let (boosted, gains) = boost::fit(train, &hp.boost, &mut rng)?;
            split_gains = gains;
            ModelParams::Boosted(boosted)
        }
        ModelKind::Knn => ModelParams::Knn(KnnModel::fit(train, &hp.knn)),
        ModelKind::GaussianNb => ModelParams::Bayes(GaussianNb::fit(train, &hp.bayes)),
    };
    Ok(TrainedModel {
        kind,
        feature_names: train.schema().names().iter().map(|s| s.to_string()).collect(),
        params,
        split_gains,
    })
}

/// Indices of the `k` most important features, most important first; equal
/// weights keep ascending index order.
pub fn top_k(imp: &FeatureImportance, k: usize) -> Result<Vec<usize>> {
    let p = imp.len();
    if k == 0 || k > p {
        return Err(Error::InvalidParameter(format!("k = {k} not in [1, {p}]")));
    }
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| imp.weights[b].total_cmp(&imp.weights[a]).then(a.cmp(&b)));
    order.truncate(k);
    Ok(order)
}
