mod common;

use hdsurvey::classifiers::{train, Hyperparams, ModelKind};
use hdsurvey::sampling::train_test_split;
use hdsurvey::stability::{reduce_dataset, run_stability, StabilityConfig};
use hdsurvey::{synthesize, Error, SeededRng, SynthSpec};

use common::{accuracy, planted};

fn config(iterations: usize, n_per_class: usize, k_select: usize) -> StabilityConfig {
    StabilityConfig {
        iterations,
        n_per_class,
        k_select,
        master_seed: 2024,
        ..Default::default()
    }
}

#[test]
fn single_iteration_counts_are_binary() {
    let d = planted(200, &[2], 0.5, 1);
    let cfg = StabilityConfig {
        models: vec![ModelKind::LogReg],
        ..config(1, 100, 10)
    };
    let r = run_stability(&d, &cfg).unwrap();
    let f = r.table.frequencies(0);
    assert!(f.iter().all(|&v| v == 0.0 || v == 1.0));
    assert_eq!(f.iter().filter(|&&v| v == 1.0).count(), 10);
    assert_eq!(r.iterations.len(), 1);
    assert_eq!(r.consensus.len(), 21);
    assert_eq!(r.top_stable.len(), 10);
}

#[test]
fn planted_feature_always_selected() {
    let d = planted(1000, &[0], 1.0, 2);
    let r = run_stability(&d, &config(30, 1000, 10)).unwrap();
    for m in 0..r.table.models.len() {
        assert_eq!(r.table.frequency(m, 0), 1.0, "{}", r.table.models[m]);
    }
    assert_eq!(r.consensus[0], 0);
    assert!(r.table.counting_identity_holds());
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let d = planted(300, &[0, 13], 0.4, 3);
    let base = config(12, 200, 5);
    let one = run_stability(
        &d,
        &StabilityConfig {
            workers: Some(1),
            ..base.clone()
        },
    )
    .unwrap();
    let four = run_stability(
        &d,
        &StabilityConfig {
            workers: Some(4),
            ..base
        },
    )
    .unwrap();
    assert_eq!(one, four);
    assert_eq!(one.table.to_csv(), four.table.to_csv());
    assert_eq!(one.consensus_csv(), four.consensus_csv());
}

#[test]
fn input_guards() {
    let raw = synthesize(&SynthSpec {
        n_neg: 50,
        n_pos: 20,
        signal_features: vec![],
        signal_strength: 0.0,
        seed: 0,
    })
    .unwrap();
    assert!(matches!(
        run_stability(&raw, &config(1, 10, 3)),
        Err(Error::NotNormalized)
    ));
    let d = raw.normalize().unwrap();
    assert!(matches!(
        run_stability(&d, &config(1, 30, 3)),
        Err(Error::InsufficientClass { class: "positive", .. })
    ));
    let with_knn = StabilityConfig {
        models: vec![ModelKind::Knn],
        ..config(1, 10, 3)
    };
    assert!(matches!(run_stability(&d, &with_knn), Err(Error::NoImportance(_))));
}

#[test]
fn signal_rank_improves_with_strength() {
    let mut ranks = Vec::new();
    for strength in [0.25, 0.5, 1.0] {
        let d = planted(600, &[6], strength, 44);
        let r = run_stability(&d, &config(30, 500, 10)).unwrap();
        ranks.push(r.consensus.iter().position(|&f| f == 6).unwrap());
    }
    assert!(ranks.windows(2).all(|w| w[0] >= w[1]), "{ranks:?}");
}

#[test]
fn reduced_feature_set_retains_accuracy() {
    let signal = [0, 3, 13];
    let raw = synthesize(&SynthSpec {
        n_neg: 1500,
        n_pos: 1500,
        signal_features: signal.to_vec(),
        signal_strength: 0.3,
        seed: 5,
    })
    .unwrap();
    let (train_raw, test_raw) = train_test_split(&raw, 0.3, 9).unwrap();
    let train_set = train_raw.normalize().unwrap();
    let test_set = train_set.scaler().unwrap().transform(&test_raw).unwrap();

    let r = run_stability(&train_set, &config(30, 1000, 3)).unwrap();
    let mut chosen = r.top_stable.clone();
    chosen.sort_unstable();
    assert_eq!(chosen, signal);

    let hp = Hyperparams::default();
    let rng = SeededRng::new(1);
    let full = train(ModelKind::LogReg, &train_set, &hp, &rng).unwrap();
    let reduced_train = reduce_dataset(&train_set, &r.top_stable).unwrap();
    let reduced_test = reduce_dataset(&test_set, &r.top_stable).unwrap();
    let reduced = train(ModelKind::LogReg, &reduced_train, &hp, &rng).unwrap();
    let (a_full, a_reduced) = (accuracy(&full, &test_set), accuracy(&reduced, &reduced_test));
    assert!((a_full - a_reduced).abs() <= 0.02, "{a_full} vs {a_reduced}");
}

#[test]
fn reduce_dataset_cases() {
    let d = planted(20, &[0], 0.5, 6);
    let top10: Vec<usize> = (0..10).collect();
    let r = reduce_dataset(&d, &top10).unwrap();
    assert_eq!((r.n_rows(), r.n_features()), (d.n_rows(), 10));
    assert_eq!(r.labels(), d.labels());
    let all: Vec<usize> = (0..21).collect();
    assert_eq!(reduce_dataset(&d, &all).unwrap(), d);
    assert!(matches!(reduce_dataset(&d, &[]), Err(Error::EmptySelection)));
    assert!(matches!(reduce_dataset(&d, &[1, 1]), Err(Error::DuplicateFeature(1))));
}
