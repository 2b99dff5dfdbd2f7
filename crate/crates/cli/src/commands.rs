//! The subcommands as pure functions of a [`RunConfig`]: each returns the
//! text to print and the files to write, and [`finish`] persists them.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::path::Path;
use std::time::Instant;

use hdsurvey::dataset::{load_csv, synthesize_with_schema, Dataset, FeatureKind, REDUCED_QUESTIONNAIRE};
use hdsurvey::pipeline::{run_balanced_experiment, run_experiment, ExperimentSpec};
use hdsurvey::report::PerformanceTable;
use hdsurvey::sampling::SampleSpec;
use hdsurvey::stability::{run_stability, StabilityResult};
use hdsurvey::surveytime::{best_fit, LogisticParams, SurveyVariant, TimeReductionReport, TriangularParams};
use hdsurvey::{SeededRng, SynthSpec, TimeSamples};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::manifest::{
    digest, write_atomic, OutputFile, RunManifest, MANIFEST_FILE, MANIFEST_FORMAT, MANIFEST_VERSION,
};

pub struct Artifact {
    pub name: String,
    pub contents: String,
}

pub struct CommandOutput {
    pub command: &'static str,
    pub text: String,
    pub artifacts: Vec<Artifact>,
    pub timings: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl CommandOutput {
    fn new(command: &'static str) -> Self {
        Self {
            command,
            text: String::new(),
            artifacts: Vec::new(),
            timings: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    fn add(&mut self, name: &str, contents: String) {
        self.artifacts.push(Artifact {
            name: name.to_string(),
            contents,
        });
    }

    fn add_json<T: Serialize>(&mut self, name: &str, value: &T) {
        let mut s = serde_json::to_string_pretty(value).expect("serializable");
        s.push('\n');
        self.add(name, s);
    }

    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let v = f();
        self.timings.insert(stage.to_string(), t.elapsed().as_secs_f64());
        v
    }

    pub fn artifact(&self, name: &str) -> Option<&str> {
        self.artifacts
            .iter()
            .find(|a| a.name == name)
            .map(|a| a.contents.as_str())
    }
}

/// Writes every artifact and then the manifest into `cfg.out`. Commands with
/// no artifacts write nothing.
pub fn finish(cfg: &RunConfig, output: &CommandOutput) -> CliResult<Option<RunManifest>> {
    if output.artifacts.is_empty() {
        return Ok(None);
    }
    let mut outputs = Vec::with_capacity(output.artifacts.len());
    for a in &output.artifacts {
        write_atomic(&cfg.out.join(&a.name), a.contents.as_bytes())?;
        outputs.push(OutputFile {
            name: a.name.clone(),
            bytes: a.contents.len(),
            sha256: digest(a.contents.as_bytes()),
        });
    }
    let manifest = RunManifest {
        format: MANIFEST_FORMAT.into(),
        version: MANIFEST_VERSION,
        command: output.command.into(),
        library_version: hdsurvey::VERSION.into(),
        config: cfg.clone(),
        notes: output.notes.clone(),
        timings_seconds: output.timings.clone(),
        outputs,
    };
    write_atomic(&cfg.out.join(MANIFEST_FILE), manifest.to_json().as_bytes())?;
    Ok(Some(manifest))
}

pub fn load_dataset(cfg: &RunConfig) -> CliResult<Dataset> {
    let schema = cfg.feature_schema()?;
    let path = cfg.dataset_path()?;
    load_csv(path, &schema).map_err(|e| CliError::from(e).context(path.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureSummary {
    pub name: String,
    pub kind: FeatureKind,
    pub declared: (f64, f64),
    /// Observed (min, max); absent for an empty table.
    pub observed: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InspectSummary {
    pub rows: usize,
    pub negatives: usize,
    pub positives: usize,
    pub features: Vec<FeatureSummary>,
}

fn num(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v}")
    } else {
        format!("{v:.3}")
    }
}

impl InspectSummary {
    pub fn of(d: &Dataset) -> Self {
        let counts = d.class_counts();
        let features = d
            .schema()
            .features()
            .iter()
            .enumerate()
            .map(|(j, f)| {
                let observed = d.column(j).fold(None, |acc: Option<(f64, f64)>, v| {
                    Some(acc.map_or((v, v), |(lo, hi)| (lo.min(v), hi.max(v))))
                });
                FeatureSummary {
                    name: f.name.clone(),
                    kind: f.kind,
                    declared: (f.min, f.max),
                    observed,
                }
            })
            .collect();
        Self {
            rows: d.n_rows(),
            negatives: counts.negatives,
            positives: counts.positives,
            features,
        }
    }

    pub fn headline(&self) -> String {
        format!(
            "{} rows, {} negative, {} positive, {} features",
            self.rows,
            self.negatives,
            self.positives,
            self.features.len()
        )
    }

    pub fn render_text(&self) -> String {
        let mut out = self.headline();
        out.push('\n');
        let w = self.features.iter().map(|f| f.name.len()).max().unwrap_or(0).max(7);
        let _ = writeln!(
            out,
            "{:w$}  {:10}  {:>15}  {:>15}",
            "feature", "kind", "declared", "observed"
        );
        for f in &self.features {
            let kind = match f.kind {
                FeatureKind::Binary => "binary",
                FeatureKind::Ordinal => "ordinal",
                FeatureKind::Continuous => "continuous",
            };
            let declared = format!("{}..{}", num(f.declared.0), num(f.declared.1));
            let observed = f
                .observed
                .map_or("-".to_string(), |(lo, hi)| format!("{}..{}", num(lo), num(hi)));
            let _ = writeln!(out, "{:w$}  {kind:10}  {declared:>15}  {observed:>15}", f.name);
        }
        out
    }
}

pub fn inspect(cfg: &RunConfig) -> CliResult<CommandOutput> {
    let mut out = CommandOutput::new("inspect");
    let d = out.time("load", || load_dataset(cfg))?;
    out.text = InspectSummary::of(&d).render_text();
    Ok(out)
}

fn selected_indices(d: &Dataset, names: &[String]) -> CliResult<Vec<usize>> {
    d.schema()
        .indices_of(names)
        .map_err(|e| CliError::malformed(format!("feature selection: {e}")))
}

fn push_table(out: &mut CommandOutput, stem: &str, table: &PerformanceTable) {
    out.text.push_str(&table.render_text());
    out.add(&format!("{stem}.txt"), table.render_text());
    out.add(&format!("{stem}.csv"), table.to_csv());
    out.add_json(&format!("{stem}.json"), table);
}

/// All seven models on a stratified split of the full dataset, before and
/// after restricting to the configured question list (the ten-question
/// reduced survey by default).
pub fn baseline(cfg: &RunConfig) -> CliResult<CommandOutput> {
    let mut out = CommandOutput::new("baseline");
    let raw = out.time("load", || load_dataset(cfg))?;
    let names: Vec<String> = match &cfg.selected {
        Some(list) => list.clone(),
        None => REDUCED_QUESTIONNAIRE.iter().map(|s| s.to_string()).collect(),
    };
    let spec = ExperimentSpec {
        title: "Performance on the whole data".into(),
        models: cfg.table_models()?,
        hyperparams: cfg.hyperparams.clone(),
        test_fraction: cfg.test_fraction,
        seed: cfg.master_seed,
        selected: selected_indices(&raw, &names)?,
    };
    let table = out.time("experiment", || run_experiment(&raw, &spec))?;
    push_table(&mut out, "baseline", &table);
    Ok(out)
}

/// Reads the feature column of a consensus CSV written by `stability`.
pub fn read_consensus(path: &Path) -> CliResult<Vec<String>> {
    let ctx = |e: CliError| e.context(path.display());
    let text = fs::read_to_string(path).map_err(|e| ctx(CliError::malformed(e.to_string())))?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("rank,index,feature,mean_frequency") {
        return Err(ctx(CliError::malformed("not a consensus file (header mismatch)")));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.split(',')
                .nth(2)
                .map(|s| s.trim().to_string())
                .ok_or_else(|| ctx(CliError::malformed(format!("line {}: missing feature column", i + 2))))
        })
        .collect()
}

fn stability_artifacts(out: &mut CommandOutput, result: &StabilityResult) {
    out.add("frequency.csv", result.table.to_csv());
    out.add("consensus.csv", result.consensus_csv());
    out.add_json("stability.json", result);
    out.notes.push(
        "each iteration draws one balanced sample shared by every model; \
         features are min-max scaled on the whole dataset first"
            .into(),
    );
}

fn run_stability_stage(cfg: &RunConfig, raw: &Dataset, out: &mut CommandOutput) -> CliResult<StabilityResult> {
    let scfg = cfg.stability_config()?;
    let scaled = raw.normalize()?;
    let result = out.time("stability", || run_stability(&scaled, &scfg))?;
    stability_artifacts(out, &result);
    Ok(result)
}

/// Balanced undersampling, then the before/after table. The "after" features
/// come from `selected`, else the top `k_select` rows of a consensus file,
/// else a fresh stability run.
pub fn balanced(cfg: &RunConfig) -> CliResult<CommandOutput> {
    let mut out = CommandOutput::new("balanced");
    let raw = out.time("load", || load_dataset(cfg))?;
    let k = cfg.stability.k_select;
    let (names, source) = match (&cfg.selected, &cfg.consensus) {
        (Some(list), _) => (list.clone(), "configured list".to_string()),
        (None, Some(path)) => {
            let all = read_consensus(path)?;
            if all.len() < k {
                return Err(CliError::malformed(format!(
                    "{}: {} features listed, {k} requested",
                    path.display(),
                    all.len()
                )));
            }
            (all[..k].to_vec(), format!("top {k} of {}", path.display()))
        }
        (None, None) => {
            let r = run_stability_stage(cfg, &raw, &mut out)?;
            let names = r.top_stable_names().iter().map(|s| s.to_string()).collect();
            (
                names,
                format!("top {k} of a {}-iteration stability run", cfg.stability.iterations),
            )
        }
    };
    let spec = ExperimentSpec {
        title: format!(
            "Performance on balanced samples ({} per class)",
            cfg.sampling.n_per_class
        ),
        models: cfg.table_models()?,
        hyperparams: cfg.hyperparams.clone(),
        test_fraction: cfg.test_fraction,
        seed: cfg.master_seed,
        selected: selected_indices(&raw, &names)?,
    };
    let sample = SampleSpec {
        n_per_class: cfg.sampling.n_per_class,
        seed: cfg.master_seed,
    };
    let table = out.time("experiment", || run_balanced_experiment(&raw, sample, &spec))?;
    let _ = writeln!(out.text, "selected features ({source}): {}", names.join(", "));
    push_table(&mut out, "balanced", &table);
    Ok(out)
}

pub fn render_frequencies(r: &StabilityResult) -> String {
    let t = &r.table;
    let w = t.feature_names.iter().map(|n| n.len()).max().unwrap_or(0).max(7);
    let mut s = format!(
        "selection frequency over {} iterations, top {} per model\n{:>4}  {:w$}",
        t.iterations, t.k_select, "rank", "feature"
    );
    for m in &t.models {
        let _ = write!(s, "  {:>6}", m.short_name());
    }
    s.push_str("    mean\n");
    for (rank, &f) in r.consensus.iter().enumerate() {
        let _ = write!(s, "{:>4}  {:w$}", rank + 1, t.feature_names[f]);
        for m in 0..t.models.len() {
            let _ = write!(s, "  {:>6.3}", t.frequency(m, f));
        }
        let _ = writeln!(s, "  {:>6.3}", t.mean_frequency(f));
    }
    let _ = writeln!(s, "top stable: {}", r.top_stable_names().join(", "));
    s
}

pub fn stability(cfg: &RunConfig) -> CliResult<CommandOutput> {
    let mut out = CommandOutput::new("stability");
    let raw = out.time("load", || load_dataset(cfg))?;
    let result = run_stability_stage(cfg, &raw, &mut out)?;
    if !result.table.counting_identity_holds() {
        return Err(CliError::infeasible("selection counts do not sum to k per iteration"));
    }
    out.text = render_frequencies(&result);
    Ok(out)
}

fn read_times(path: &Path, variant: SurveyVariant) -> CliResult<TimeSamples> {
    let f = File::open(path).map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))?;
    TimeSamples::read_csv(f, variant).map_err(|e| CliError::from(e).context(path.display()))
}

/// Fits both survey-time files and reports the reduction of the mean.
pub fn reduce_time(cfg: &RunConfig) -> CliResult<CommandOutput> {
    let mut out = CommandOutput::new("reduce-time");
    let missing = |which: &str| CliError::malformed(format!("no {which} time file given"));
    let before_path = cfg.time.before.as_deref().ok_or_else(|| missing("before"))?;
    let after_path = cfg.time.after.as_deref().ok_or_else(|| missing("after"))?;
    let before = read_times(before_path, SurveyVariant::FullSurvey)?;
    let after = read_times(after_path, SurveyVariant::ReducedSurvey)?;
    // fit each file alone first so a failure names its file
    for (path, s) in [(before_path, &before), (after_path, &after)] {
        best_fit(s).map_err(|e| CliError::from(e).context(path.display()))?;
    }
    let report = out.time("fit", || {
        TimeReductionReport::build(&before, &after, (cfg.time.questions_before, cfg.time.questions_after))
    })?;
    out.text = report.render_text();
    out.add("time_reduction.txt", report.render_text());
    out.add_json("time_reduction.json", &report);
    Ok(out)
}

/// Time-sample generators used by `synth`: the full survey follows
/// Triangular(3.5, 6.4, 6.4) minutes, the reduced one Logistic(1.19, 0.019).
pub fn synthetic_times(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let tri = TriangularParams::new(3.5, 6.4, 6.4).expect("valid");
    let logi = LogisticParams::new(1.19, 0.019).expect("valid");
    let root = SeededRng::new(seed);
    let mut r1 = root.fork(1);
    let mut r2 = root.fork(2);
    let before = (0..n).map(|_| tri.sample(&mut r1)).collect();
    let after = (0..n).map(|_| logi.sample(&mut r2)).collect();
    (before, after)
}

fn times_csv(values: &[f64]) -> String {
    let mut s = String::from("minutes\n");
    for v in values {
        let _ = writeln!(s, "{v:?}");
    }
    s
}

/// Planted-signal dataset (and optionally survey-time files) for dry runs.
pub fn synth(cfg: &RunConfig) -> CliResult<CommandOutput> {
    let mut out = CommandOutput::new("synth");
    let schema = cfg.feature_schema()?;
    let sc = &cfg.synth;
    let signal = schema
        .indices_of(&sc.signal_features)
        .map_err(|e| CliError::malformed(format!("signal features: {e}")))?;
    let spec = SynthSpec {
        n_neg: sc.n_neg,
        n_pos: sc.n_pos,
        signal_features: signal,
        signal_strength: sc.signal_strength,
        seed: cfg.master_seed,
    };
    let d = out.time("generate", || synthesize_with_schema(&schema, &spec))?;
    let mut buf = Vec::new();
    d.write_csv(&mut buf)?;
    out.add("planted.csv", String::from_utf8(buf).expect("csv is utf-8"));
    out.add("schema.toml", schema.to_toml_string());
    let _ = writeln!(
        out.text,
        "planted.csv: {} rows ({} negative, {} positive), signal in {} at strength {}",
        d.n_rows(),
        sc.n_neg,
        sc.n_pos,
        sc.signal_features.join(", "),
        sc.signal_strength
    );
    if sc.time_samples > 0 {
        let (before, after) = synthetic_times(sc.time_samples, cfg.master_seed);
        out.add("time_before.csv", times_csv(&before));
        out.add("time_after.csv", times_csv(&after));
        let _ = writeln!(
            out.text,
            "time_before.csv / time_after.csv: {} rows each",
            sc.time_samples
        );
    }
    Ok(out)
}
