use hdsurvey_demo::{fit_times_json, metrics_json, sample_times_text, stability_json};
use serde_json::Value;

#[test]
fn fit_view_has_histogram_and_both_curves() {
    let text = sample_times_text(500, false, 1);
    let v: Value = serde_json::from_str(&fit_times_json(&text).unwrap()).unwrap();
    assert_eq!(v["n"], 500);
    assert!(v["best"].as_str().unwrap().starts_with("Triangle"));
    assert_eq!(v["curves"].as_array().unwrap().len(), 2);
    let edges = v["histogram"]["edges"].as_array().unwrap();
    let dens = v["histogram"]["density"].as_array().unwrap();
    assert_eq!(edges.len(), dens.len() + 1);
    let w = edges[1].as_f64().unwrap() - edges[0].as_f64().unwrap();
    let mass: f64 = dens.iter().map(|d| d.as_f64().unwrap() * w).sum();
    assert!((mass - 1.0).abs() < 1e-9);
}

#[test]
fn bad_input_is_an_error() {
    assert!(fit_times_json("1.0, x").unwrap_err().contains("`x`"));
    assert!(fit_times_json("").is_err());
    assert!(metrics_json(0, 0, 0, 0).is_err());
}

#[test]
fn worked_metrics_example() {
    let v: Value = serde_json::from_str(&metrics_json(3, 1, 5, 1).unwrap()).unwrap();
    assert_eq!(v["metrics"]["accuracy"], 0.8);
    assert_eq!(v["metrics"]["f1"], 0.75);
    assert_eq!(v["confusion"]["fn"], 1);
}

#[test]
fn stability_finds_the_planted_features() {
    let v: Value = serde_json::from_str(&stability_json(1.0, 150, 4, 3, 5).unwrap()).unwrap();
    let mut top: Vec<u64> = v["consensus"].as_array().unwrap()[..3]
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect();
    top.sort();
    assert_eq!(top, vec![0, 3, 13]);
    assert_eq!(v["frequencies"].as_array().unwrap().len(), 5);
}
