//! Run configuration: one TOML file, optionally overridden by flags.
//!
//! ```toml
//! dataset = "heart_disease_health_indicators_BRFSS2015.csv"
//! master_seed = 7
//! out = "results"
//! models = ["LR", "RF"]
//! selected = ["GenHlth", "Age", "HighBP"]
//!
//! [sampling]
//! n_per_class = 1000
//!
//! [stability]
//! iterations = 300
//! k_select = 10
//!
//! [hyperparams.forest]
//! n_trees = 100
//! ```
//!
//! Relative paths are resolved against the directory holding the config.

use std::fs;
use std::path::{Path, PathBuf};

use hdsurvey::classifiers::{Hyperparams, ModelKind};
use hdsurvey::dataset::FeatureSchema;
use hdsurvey::sampling::DEFAULT_TEST_FRACTION;
use hdsurvey::stability::StabilityConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingSection {
    pub n_per_class: usize,
}

impl Default for SamplingSection {
    fn default() -> Self {
        Self { n_per_class: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilitySection {
    pub iterations: usize,
    pub k_select: usize,
    /// Importance-capable models; defaults to all five.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub models: Option<Vec<String>>,
    /// Thread count. Never changes results.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl Default for StabilitySection {
    fn default() -> Self {
        let d = StabilityConfig::default();
        Self {
            iterations: d.iterations,
            k_select: d.k_select,
            models: None,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub before: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub after: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub questions_before: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub questions_after: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub n_neg: usize,
    pub n_pos: usize,
    /// Feature names carrying the label signal.
    pub signal_features: Vec<String>,
    pub signal_strength: f64,
    /// Rows per survey-time file; 0 skips them.
    pub time_samples: usize,
}

impl Default for SynthSection {
    fn default() -> Self {
        Self {
            n_neg: 5000,
            n_pos: 1500,
            signal_features: vec!["HighBP".into(), "BMI".into(), "GenHlth".into()],
            signal_strength: 0.3,
            time_samples: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,
    /// Schema TOML; the built-in BRFSS schema when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schema: Option<PathBuf>,
    pub master_seed: u64,
    pub test_fraction: f64,
    /// Models for the performance tables; all seven when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub models: Option<Vec<String>>,
    /// Feature names for the "after" panel.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selected: Option<Vec<String>>,
    /// Consensus CSV from an earlier stability run; its top `k_select` rows
    /// become the balanced "after" panel.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consensus: Option<PathBuf>,
    pub out: PathBuf,
    pub sampling: SamplingSection,
    pub stability: StabilitySection,
    pub hyperparams: Hyperparams,
    pub time: TimeSection,
    pub synth: SynthSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            schema: None,
            master_seed: 0,
            test_fraction: DEFAULT_TEST_FRACTION,
            models: None,
            selected: None,
            consensus: None,
            out: PathBuf::from("hdsurvey-out"),
            sampling: SamplingSection::default(),
            stability: StabilitySection::default(),
            hyperparams: Hyperparams::default(),
            time: TimeSection::default(),
            synth: SynthSection::default(),
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub iterations: Option<usize>,
    pub n_per_class: Option<usize>,
    pub k: Option<usize>,
    pub models: Option<Vec<String>>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub dataset: Option<PathBuf>,
}

fn absolutize(base: &Path, p: &mut Option<PathBuf>) {
    if let Some(path) = p {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::malformed(format!("config: {e}")))
    }

    /// Reads a TOML config, or the config snapshot inside a JSON run manifest.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))?;
        let mut cfg = if path.extension().is_some_and(|e| e == "json") {
            RunManifest::from_json(&text)
                .map_err(|e| e.context(path.display()))?
                .config
        } else {
            Self::from_toml_str(&text).map_err(|e| e.context(path.display()))?
        };
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        absolutize(base, &mut self.dataset);
        absolutize(base, &mut self.schema);
        absolutize(base, &mut self.consensus);
        absolutize(base, &mut self.time.before);
        absolutize(base, &mut self.time.after);
        if self.out.is_relative() {
            self.out = base.join(&self.out);
        }
    }

    /// Makes every path absolute against the working directory so the
    /// snapshot stored in a manifest does not depend on where it is rerun.
    pub fn anchor_paths(&mut self) -> CliResult<()> {
        let cwd = std::env::current_dir().map_err(|e| CliError::infeasible(format!("working directory: {e}")))?;
        self.resolve_paths(&cwd);
        Ok(())
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.master_seed = s;
        }
        if let Some(n) = o.iterations {
            self.stability.iterations = n;
        }
        if let Some(n) = o.n_per_class {
            self.sampling.n_per_class = n;
        }
        if let Some(k) = o.k {
            self.stability.k_select = k;
        }
        if let Some(m) = &o.models {
            self.models = Some(m.clone());
            self.stability.models = Some(m.clone());
        }
        if let Some(p) = &o.out {
            self.out = p.clone();
        }
        if let Some(w) = o.workers {
            self.stability.workers = Some(w);
        }
        if let Some(p) = &o.dataset {
            self.dataset = Some(p.clone());
        }
    }

    pub fn feature_schema(&self) -> CliResult<FeatureSchema> {
        match &self.schema {
            Some(p) => FeatureSchema::load(p).map_err(|e| CliError::from(e).context(p.display())),
            None => Ok(FeatureSchema::brfss()),
        }
    }

    pub fn dataset_path(&self) -> CliResult<&Path> {
        self.dataset
            .as_deref()
            .ok_or_else(|| CliError::malformed("no dataset given (positional argument or `dataset` in the config)"))
    }

    /// Models for the performance tables.
    pub fn table_models(&self) -> CliResult<Vec<ModelKind>> {
        match &self.models {
            Some(names) => parse_models(names),
            None => Ok(ModelKind::ALL.to_vec()),
        }
    }

    pub fn stability_config(&self) -> CliResult<StabilityConfig> {
        let models = match &self.stability.models {
            Some(names) => parse_models(names)?,
            None => ModelKind::SELECTORS.to_vec(),
        };
        if let Some(k) = models.iter().find(|k| !k.has_importance()) {
            return Err(CliError::malformed(format!(
                "{k} has no feature importance and cannot rank features"
            )));
        }
        Ok(StabilityConfig {
            iterations: self.stability.iterations,
            n_per_class: self.sampling.n_per_class,
            k_select: self.stability.k_select,
            models,
            master_seed: self.master_seed,
            hyperparams: self.hyperparams.clone(),
            workers: self.stability.workers,
        })
    }
}

pub fn parse_models(names: &[String]) -> CliResult<Vec<ModelKind>> {
    let mut out: Vec<ModelKind> = Vec::with_capacity(names.len());
    for n in names {
        let kind: ModelKind = n
            .trim()
            .parse()
            .map_err(|e: hdsurvey::Error| CliError::malformed(e.to_string()))?;
        if out.contains(&kind) {
            return Err(CliError::malformed(format!("model {kind} listed twice")));
        }
        out.push(kind);
    }
    if out.is_empty() {
        return Err(CliError::malformed("model list is empty"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        assert_eq!(RunConfig::from_toml_str("").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml_str("seeed = 3").is_err());
        assert!(RunConfig::from_toml_str("[stability]\niters = 3").is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let mut c = RunConfig::from_toml_str("master_seed = 4\n[stability]\niterations = 9").unwrap();
        c.apply(&Overrides {
            seed: Some(11),
            models: Some(vec!["lr".into(), "rf".into()]),
            ..Default::default()
        });
        assert_eq!(c.master_seed, 11);
        assert_eq!(c.stability.iterations, 9);
        let s = c.stability_config().unwrap();
        assert_eq!(s.models, vec![ModelKind::LogReg, ModelKind::RandomForest]);
        assert_eq!(s.master_seed, 11);
    }

    #[test]
    fn model_lists() {
        assert!(parse_models(&["LR".into(), "lr".into()]).is_err());
        assert!(parse_models(&["tree".into()]).is_err());
        let mut c = RunConfig::default();
        c.stability.models = Some(vec!["knn".into()]);
        assert!(c.stability_config().is_err());
    }

    #[test]
    fn hyperparams_section_parses() {
        let c = RunConfig::from_toml_str("[hyperparams.forest]\nn_trees = 7").unwrap();
        assert_eq!(c.hyperparams.forest.n_trees, 7);
        assert_eq!(c.hyperparams.boost, Hyperparams::default().boost);
        let c = RunConfig::from_toml_str("[hyperparams.sgd]\nl2 = 0.01").unwrap();
        assert_eq!(
            c.hyperparams.sgd.learning_rate,
            Hyperparams::default().sgd.learning_rate
        );
        assert_eq!(c.hyperparams.sgd.l2, 0.01);
        assert!(RunConfig::from_toml_str("[hyperparams.forest]\ntrees = 7").is_err());
    }

    #[test]
    fn relative_paths_follow_the_config() {
        let mut c = RunConfig::from_toml_str("dataset = \"d.csv\"\nout = \"o\"").unwrap();
        c.resolve_paths(Path::new("/tmp/run"));
        assert_eq!(c.dataset.unwrap(), Path::new("/tmp/run/d.csv"));
        assert_eq!(c.out, Path::new("/tmp/run/o"));
    }
}
