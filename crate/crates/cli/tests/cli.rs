use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hdsurvey::classifiers::ModelKind;
use hdsurvey_cli::{commands, RunConfig, RunManifest};

fn hdsurvey(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hdsurvey"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// `synth` into `dir/fx`, returning the dataset path.
fn fixture(dir: &Path, extra: &[&str]) -> PathBuf {
    let mut args = vec![
        "synth", "--out", "fx", "--n-neg", "1500", "--n-pos", "900", "--seed", "3",
    ];
    args.extend_from_slice(extra);
    let o = hdsurvey(dir, &args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    dir.join("fx/planted.csv")
}

#[test]
fn inspect_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), &[]);
    let o = hdsurvey(dir.path(), &["inspect", "fx/planted.csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(
        text.lines().next().unwrap(),
        "2400 rows, 1500 negative, 900 positive, 21 features"
    );
    assert!(text.contains("GenHlth"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fixture(p, &[]);

    fs::write(p.join("empty.csv"), "").unwrap();
    let o = hdsurvey(p, &["inspect", "empty.csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("0 rows, 0 negative, 0 positive, 21 features"));

    fs::write(p.join("bad.csv"), "HeartDiseaseorAttack,HighBP,Oops\n0,1,2\n").unwrap();
    let o = hdsurvey(p, &["inspect", "bad.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("HighChol"));

    let o = hdsurvey(p, &["reduce-time", "empty.csv", "empty.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty.csv"));

    let o = hdsurvey(
        p,
        &[
            "stability",
            "fx/planted.csv",
            "--n-per-class",
            "901",
            "--iterations",
            "1",
        ],
    );
    assert_eq!(o.status.code(), Some(1));

    let o = hdsurvey(p, &["stability", "fx/planted.csv", "--models", "knn"]);
    assert_eq!(o.status.code(), Some(2));

    let o = hdsurvey(p, &["inspect", "missing.csv"]);
    assert_eq!(o.status.code(), Some(2));

    fs::write(p.join("cfg.toml"), "mystery = 1\n").unwrap();
    let o = hdsurvey(p, &["inspect", "fx/planted.csv", "--config", "cfg.toml"]);
    assert_eq!(o.status.code(), Some(2));

    let o = hdsurvey(p, &["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stability_smoke_and_manifest_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fixture(p, &[]);
    let o = hdsurvey(
        p,
        &[
            "stability",
            "fx/planted.csv",
            "--iterations",
            "1",
            "--n-per-class",
            "300",
            "--out",
            "a",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let freq = fs::read_to_string(p.join("a/frequency.csv")).unwrap();
    let lines: Vec<&str> = freq.lines().collect();
    assert_eq!(lines.len(), 6);
    for row in &lines[1..] {
        let cells: Vec<f64> = row.split(',').skip(1).map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells.len(), 21);
        assert_eq!(cells.iter().sum::<f64>(), 10.0);
    }

    let manifest = RunManifest::from_json(&fs::read_to_string(p.join("a/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.command, "stability");
    assert_eq!(manifest.outputs.len(), 3);
    assert!(!manifest.notes.is_empty());

    let o = hdsurvey(p, &["stability", "--config", "a/manifest.json", "--out", "b"]);
    assert!(o.status.success());
    for f in ["frequency.csv", "consensus.csv", "stability.json"] {
        assert_eq!(
            fs::read(p.join("a").join(f)).unwrap(),
            fs::read(p.join("b").join(f)).unwrap(),
            "{f}"
        );
    }
    let rerun = RunManifest::from_json(&fs::read_to_string(p.join("b/manifest.json")).unwrap()).unwrap();
    assert_eq!(rerun.outputs, manifest.outputs);
    assert!(fs::read_dir(p.join("b"))
        .unwrap()
        .all(|e| !e.unwrap().file_name().to_string_lossy().ends_with(".tmp")));
}

#[test]
fn reduce_time_reports_reduction() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fixture(p, &["--time-samples", "3000"]);
    let o = hdsurvey(
        p,
        &["reduce-time", "fx/time_before.csv", "fx/time_after.csv", "--out", "rt"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(p.join("rt/time_reduction.json")).unwrap()).unwrap();
    let r = report["reduction_percent"].as_f64().unwrap();
    // Triangular(3.5, 6.4, 6.4) mean 5.433 against Logistic mean 1.19
    assert!((r - 78.1).abs() < 0.5, "{r}");
    assert_eq!(report["before"]["comparison"]["best"]["params"]["family"], "triangular");
    assert_eq!(report["after"]["comparison"]["best"]["params"]["family"], "logistic");

    let o = hdsurvey(p, &["reduce-time", "fx/time_before.csv", "fx/time_before.csv"]);
    assert!(stdout(&o).contains("0.0%"));
}

fn planted_config(p: &Path) -> RunConfig {
    RunConfig {
        dataset: Some(p.join("fx/planted.csv")),
        out: p.join("out"),
        ..Default::default()
    }
}

#[test]
fn baseline_identity_reduction_and_model_subset() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), &[]);
    let mut cfg = planted_config(dir.path());
    cfg.models = Some(vec!["LR".into(), "RF".into(), "GNB".into()]);
    cfg.selected = Some(
        hdsurvey::dataset::FeatureSchema::brfss()
            .names()
            .iter()
            .map(|s| s.to_string())
            .collect(),
    );
    let out = commands::baseline(&cfg).unwrap();
    let table: hdsurvey::report::PerformanceTable =
        serde_json::from_str(out.artifact("baseline.json").unwrap()).unwrap();
    assert_eq!(table.rows.len(), 3);
    for row in &table.rows {
        assert_eq!(row.before, row.after, "{}", row.model);
    }

    cfg.models = Some(vec!["svm".into()]);
    cfg.selected = None;
    let out = commands::baseline(&cfg).unwrap();
    let csv = out.artifact("baseline.csv").unwrap();
    assert_eq!(csv.lines().count(), 3, "{csv}");
    let again = commands::baseline(&cfg).unwrap();
    assert_eq!(again.artifact("baseline.csv"), out.artifact("baseline.csv"));
}

#[test]
fn balanced_planted_selection_keeps_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), &[]);
    let mut cfg = planted_config(dir.path());
    cfg.sampling.n_per_class = 800;
    cfg.models = Some(vec!["LR".into(), "GB".into()]);
    cfg.selected = Some(vec!["HighBP".into(), "BMI".into(), "GenHlth".into()]);
    let out = commands::balanced(&cfg).unwrap();
    let table: hdsurvey::report::PerformanceTable =
        serde_json::from_str(out.artifact("balanced.json").unwrap()).unwrap();
    assert_eq!(table.split.n_test, 480);
    for kind in [ModelKind::LogReg, ModelKind::GradBoost] {
        let row = table.row(kind).unwrap();
        let (b, a) = (row.before.metrics.accuracy, row.after.metrics.accuracy);
        assert!((b - a).abs() <= 0.02, "{kind}: {b} vs {a}");
    }
}

#[test]
fn balanced_runs_stability_when_no_list_is_given() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), &[]);
    let mut cfg = planted_config(dir.path());
    cfg.sampling.n_per_class = 500;
    cfg.stability.iterations = 3;
    cfg.stability.k_select = 3;
    cfg.models = Some(vec!["LR".into()]);
    cfg.stability.models = Some(vec!["LR".into(), "RF".into()]);
    let out = commands::balanced(&cfg).unwrap();
    assert!(out.artifact("consensus.csv").is_some());
    let table: hdsurvey::report::PerformanceTable =
        serde_json::from_str(out.artifact("balanced.json").unwrap()).unwrap();
    let mut chosen = table.selected_features.clone();
    chosen.sort();
    assert_eq!(chosen, vec!["BMI", "GenHlth", "HighBP"]);
}

#[test]
fn documented_config_parses() {
    let readme = include_str!("../../../README.md");
    let start = readme.find("```toml\n").expect("toml block") + 8;
    let block = &readme[start..start + readme[start..].find("```").unwrap()];
    let cfg = RunConfig::from_toml_str(block).unwrap();
    assert_eq!(cfg.stability.workers, Some(4));
    assert_eq!(cfg.table_models().unwrap().len(), 7);
    assert_eq!(cfg.stability_config().unwrap().models.len(), 5);
}
