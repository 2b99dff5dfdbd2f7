//! Three operations for the static demo page. Each takes plain numbers or
//! text and returns a JSON string; the `*_json` functions do the work and the
//! exported wrappers only convert errors.

use hdsurvey::classifiers::ModelKind;
use hdsurvey::dataset::{synthesize, SynthSpec};
use hdsurvey::metrics::{compute, ConfusionMatrix, MetricsReport};
use hdsurvey::stability::{run_stability, StabilityConfig};
use hdsurvey::surveytime::{
    best_fit, DistributionParams, FitComparison, LogisticParams, SurveyVariant, TimeSamples, TriangularParams,
};
use hdsurvey::SeededRng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const HIST_BINS: usize = 20;
const CURVE_POINTS: usize = 120;

#[derive(Serialize)]
struct Histogram {
    edges: Vec<f64>,
    /// Normalized to a density so it overlays the fitted curves.
    density: Vec<f64>,
}

#[derive(Serialize)]
struct Curve {
    family: String,
    aic: f64,
    x: Vec<f64>,
    y: Vec<f64>,
}

#[derive(Serialize)]
struct FitView {
    n: usize,
    mean: f64,
    best: String,
    comparison: FitComparison,
    histogram: Histogram,
    curves: Vec<Curve>,
}

fn histogram(xs: &[f64], lo: f64, hi: f64) -> Histogram {
    let width = (hi - lo) / HIST_BINS as f64;
    let mut counts = [0usize; HIST_BINS];
    for &x in xs {
        let b = (((x - lo) / width) as usize).min(HIST_BINS - 1);
        counts[b] += 1;
    }
    let n = xs.len() as f64;
    Histogram {
        edges: (0..=HIST_BINS).map(|i| lo + i as f64 * width).collect(),
        density: counts.iter().map(|&c| c as f64 / (n * width)).collect(),
    }
}

fn parse_times(text: &str) -> Result<TimeSamples, String> {
    let values: Result<Vec<f64>, String> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| format!("not a number: `{t}`")))
        .collect();
    TimeSamples::new(values?, SurveyVariant::FullSurvey).map_err(|e| e.to_string())
}

/// Fits both families to whitespace- or comma-separated times.
pub fn fit_times_json(text: &str) -> Result<String, String> {
    let s = parse_times(text)?;
    let cmp = best_fit(&s).map_err(|e| e.to_string())?;
    let xs = s.values();
    let (min, max) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let pad = 0.1 * (max - min).max(1e-9);
    let (lo, hi) = (min - pad, max + pad);
    let curves = cmp
        .candidates
        .iter()
        .filter_map(|c| c.fit.as_ref())
        .map(|f| {
            let x: Vec<f64> = (0..CURVE_POINTS)
                .map(|i| lo + (hi - lo) * i as f64 / (CURVE_POINTS - 1) as f64)
                .collect();
            Curve {
                family: f.describe(),
                aic: f.aic,
                y: x.iter().map(|&v| f.params.pdf(v)).collect(),
                x,
            }
        })
        .collect();
    let view = FitView {
        n: xs.len(),
        mean: cmp.best.mean,
        best: cmp.best.describe(),
        histogram: histogram(xs, lo, hi),
        curves,
        comparison: cmp,
    };
    Ok(serde_json::to_string(&view).expect("serializable"))
}

/// Draws survey times from Triangular(3.5, 6.4, 6.4) (`reduced == false`)
/// or Logistic(1.19, 0.019), one value per line.
pub fn sample_times_text(n: usize, reduced: bool, seed: u64) -> String {
    let mut rng = SeededRng::new(seed);
    let params = if reduced {
        DistributionParams::Logistic(LogisticParams::new(1.19, 0.019).expect("valid"))
    } else {
        DistributionParams::Triangular(TriangularParams::new(3.5, 6.4, 6.4).expect("valid"))
    };
    let mut out = String::new();
    for _ in 0..n {
        let v = match params {
            DistributionParams::Triangular(t) => t.sample(&mut rng),
            DistributionParams::Logistic(l) => l.sample(&mut rng),
        };
        out.push_str(&format!("{v:.4}\n"));
    }
    out
}

#[derive(Serialize)]
struct StabilityView {
    features: Vec<String>,
    models: Vec<&'static str>,
    /// `frequencies[m][f]`
    frequencies: Vec<Vec<f64>>,
    consensus: Vec<usize>,
    mean: Vec<f64>,
    signal: Vec<usize>,
}

/// Planted-signal stability run: HighBP, BMI and GenHlth carry the label at
/// `strength`, everything else is noise.
pub fn stability_json(
    strength: f64,
    n_per_class: usize,
    iterations: usize,
    k: usize,
    seed: u64,
) -> Result<String, String> {
    let signal = vec![0, 3, 13];
    let raw = synthesize(&SynthSpec {
        n_neg: n_per_class * 2,
        n_pos: n_per_class * 2,
        signal_features: signal.clone(),
        signal_strength: strength,
        seed,
    })
    .map_err(|e| e.to_string())?;
    let d = raw.normalize().map_err(|e| e.to_string())?;
    let mut cfg = StabilityConfig {
        iterations,
        n_per_class,
        k_select: k,
        master_seed: seed,
        ..Default::default()
    };
    // keep the browser responsive: fewer trees and rounds than the defaults
    cfg.hyperparams.forest.n_trees = 30;
    cfg.hyperparams.boost.rounds = 30;
    let r = run_stability(&d, &cfg).map_err(|e| e.to_string())?;
    let t = &r.table;
    let view = StabilityView {
        features: t.feature_names.clone(),
        models: t.models.iter().map(|m: &ModelKind| m.short_name()).collect(),
        frequencies: (0..t.models.len()).map(|m| t.frequencies(m)).collect(),
        mean: (0..t.feature_names.len()).map(|f| t.mean_frequency(f)).collect(),
        consensus: r.consensus,
        signal,
    };
    Ok(serde_json::to_string(&view).expect("serializable"))
}

#[derive(Serialize)]
struct MetricsView {
    confusion: ConfusionMatrix,
    metrics: MetricsReport,
}

pub fn metrics_json(tp: u32, fp: u32, tn: u32, fn_: u32) -> Result<String, String> {
    let c = ConfusionMatrix::new(tp as usize, fp as usize, tn as usize, fn_ as usize);
    let metrics = compute(&c).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&MetricsView { confusion: c, metrics }).expect("serializable"))
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn fit_times(text: &str) -> Result<String, JsValue> {
    js(fit_times_json(text))
}

#[wasm_bindgen]
pub fn sample_times(n: usize, reduced: bool, seed: u32) -> String {
    sample_times_text(n, reduced, seed as u64)
}

#[wasm_bindgen]
pub fn stability(strength: f64, n_per_class: usize, iterations: usize, k: usize, seed: u32) -> Result<String, JsValue> {
    js(stability_json(strength, n_per_class, iterations, k, seed as u64))
}

#[wasm_bindgen]
pub fn metrics(tp: u32, fp: u32, tn: u32, fn_: u32) -> Result<String, JsValue> {
    js(metrics_json(tp, fp, tn, fn_))
}
