mod common;

use hdsurvey::dataset::{synthesize, SynthSpec};
use hdsurvey::sampling::{balanced_sample_indices, split_indices, SampleSpec};
use proptest::prelude::*;

#[test]
fn inclusion_frequency_is_uniform() {
    let d = synthesize(&SynthSpec {
        n_neg: 200,
        n_pos: 60,
        signal_features: vec![],
        signal_strength: 0.0,
        seed: 0,
    })
    .unwrap();
    let n_per_class = 50;
    let trials = 1000;
    let mut hits = vec![0usize; d.n_rows()];
    for seed in 0..trials {
        for i in balanced_sample_indices(&d, SampleSpec { n_per_class, seed }).unwrap() {
            hits[i] += 1;
        }
    }
    let pi = n_per_class as f64 / 200.0;
    let se = (pi * (1.0 - pi) / trials as f64).sqrt();
    for (i, &h) in hits.iter().enumerate() {
        if d.labels()[i] == 0 {
            let freq = h as f64 / trials as f64;
            assert!((freq - pi).abs() <= 5.0 * se, "row {i}: {freq}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) })]

    #[test]
    fn split_partitions_rows(
        n_neg in 2usize..60,
        n_pos in 2usize..60,
        frac in 0.05f64..0.95,
        seed in any::<u64>(),
    ) {
        let d = synthesize(&SynthSpec {
            n_neg, n_pos, signal_features: vec![0], signal_strength: 0.5, seed,
        }).unwrap();
        match split_indices(&d, frac, seed) {
            Ok((train, test)) => {
                let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
                all.sort_unstable();
                prop_assert_eq!(all, (0..d.n_rows()).collect::<Vec<_>>());
                for (class, size) in [(0u8, n_neg), (1u8, n_pos)] {
                    let in_test = test.iter().filter(|&&i| d.labels()[i] == class).count() as f64;
                    prop_assert!((in_test - frac * size as f64).abs() <= 1.0);
                }
            }
            Err(e) => {
                let degenerate = matches!(e, hdsurvey::Error::DegenerateSplit { .. });
                prop_assert!(degenerate);
            }
        }
    }

    #[test]
    fn balanced_sample_never_repeats_rows(k in 0usize..40, seed in any::<u64>()) {
        let d = synthesize(&SynthSpec {
            n_neg: 40, n_pos: 45, signal_features: vec![], signal_strength: 0.0, seed: 1,
        }).unwrap();
        let mut rows = balanced_sample_indices(&d, SampleSpec { n_per_class: k, seed }).unwrap();
        prop_assert_eq!(rows.len(), 2 * k);
        rows.sort_unstable();
        rows.dedup();
        prop_assert_eq!(rows.len(), 2 * k);
    }
}
