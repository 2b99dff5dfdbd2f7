#![allow(dead_code)]

use hdsurvey::dataset::{synthesize, Dataset, SynthSpec};
use hdsurvey::sampling::train_test_split;

/// Normalized planted-signal dataset on the BRFSS schema.
pub fn planted(n_per_class: usize, signal: &[usize], strength: f64, seed: u64) -> Dataset {
    synthesize(&SynthSpec {
        n_neg: n_per_class,
        n_pos: n_per_class,
        signal_features: signal.to_vec(),
        signal_strength: strength,
        seed,
    })
    .unwrap()
    .normalize()
    .unwrap()
}

/// Raw planted data split 70/30, train scaled, test scaled with train ranges.
pub fn planted_split(n_per_class: usize, signal: &[usize], strength: f64, seed: u64) -> (Dataset, Dataset) {
    let raw = synthesize(&SynthSpec {
        n_neg: n_per_class,
        n_pos: n_per_class,
        signal_features: signal.to_vec(),
        signal_strength: strength,
        seed,
    })
    .unwrap();
    let (train, test) = train_test_split(&raw, 0.3, seed ^ 0x55).unwrap();
    let train = train.normalize().unwrap();
    let test = train.scaler().unwrap().transform(&test).unwrap();
    (train, test)
}

pub fn accuracy(m: &hdsurvey::TrainedModel, d: &Dataset) -> f64 {
    let pred = m.predict_labels(d).unwrap();
    pred.iter().zip(d.labels()).filter(|(a, b)| a == b).count() as f64 / d.n_rows() as f64
}
