mod common;

use std::time::Instant;

use hdsurvey::classifiers::linear::{log_loss, logistic_objective, logistic_sample_objective, LinearModel};
use hdsurvey::classifiers::{top_k, train, FeatureImportance, Hyperparams, ModelKind, ModelParams, TrainedModel};
use hdsurvey::dataset::{Dataset, Feature, FeatureKind, FeatureSchema};
use hdsurvey::{Error, SeededRng};
use proptest::prelude::*;
use rand::Rng;

use common::{accuracy, planted, planted_split};

fn one_feature(xs: &[f64], ys: &[u8]) -> Dataset {
    let schema = FeatureSchema::new("y", vec![Feature::new("x", FeatureKind::Continuous, 0.0, 1.0)]).unwrap();
    Dataset::new(schema, xs.to_vec(), ys.to_vec())
        .unwrap()
        .normalize()
        .unwrap()
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let scale = a
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(b.iter().map(|x| x * x).sum::<f64>().sqrt());
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Central differences of `f` at `(w, b)`, intercept last.
fn finite_diff(f: impl Fn(&LinearModel) -> f64, m: &LinearModel) -> Vec<f64> {
    let h = 1e-5;
    let p = m.weights.len();
    let mut out = Vec::with_capacity(p + 1);
    for j in 0..=p {
        let mut plus = m.clone();
        let mut minus = m.clone();
        if j < p {
            plus.weights[j] += h;
            minus.weights[j] -= h;
        } else {
            plus.intercept += h;
            minus.intercept -= h;
        }
        out.push((f(&plus) - f(&minus)) / (2.0 * h));
    }
    out
}

#[test]
fn logistic_gradients_match_finite_differences() {
    let d = planted(40, &[0, 3], 0.4, 8);
    let mut rng = SeededRng::new(99);
    let l2 = 1e-3;
    for _ in 0..100 {
        let m = LinearModel {
            weights: (0..d.n_features()).map(|_| rng.gen_range(-2.0..2.0)).collect(),
            intercept: rng.gen_range(-2.0..2.0),
        };
        let (_, gw, gb) = logistic_objective(&d, &m, l2);
        let mut analytic = gw.clone();
        analytic.push(gb);
        let numeric = finite_diff(|m| logistic_objective(&d, m, l2).0, &m);
        assert!(rel_err(&analytic, &numeric) < 1e-5);

        let i = rng.gen_range(0..d.n_rows());
        let (x, y) = (d.row(i), d.labels()[i] as f64);
        let (_, gw, gb) = logistic_sample_objective(x, y, &m, l2);
        let mut analytic = gw.clone();
        analytic.push(gb);
        let numeric = finite_diff(|m| logistic_sample_objective(x, y, m, l2).0, &m);
        assert!(rel_err(&analytic, &numeric) < 1e-5);
    }
}

#[test]
fn logreg_weight_sign_matches_grid_search() {
    let d = one_feature(&[0.0, 1.0, 0.0, 1.0], &[0, 1, 0, 1]);
    let hp = Hyperparams::default();
    let m = train(ModelKind::LogReg, &d, &hp, &SeededRng::new(0)).unwrap();
    let ModelParams::Linear(fit) = m.params() else { panic!() };
    assert!(fit.weights[0] > 0.0);

    // brute-force minimiser of the same objective over a (w, b) grid
    let objective = |w: f64, b: f64| {
        let mut loss = 0.0;
        for (x, &y) in d.rows().zip(d.labels()) {
            loss += log_loss(w * x[0] + b, y as f64);
        }
        loss / d.n_rows() as f64 + 0.5 * hp.logreg.l2 * w * w
    };
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in -200..=200 {
        for k in -200..=200 {
            let (w, b) = (i as f64 * 0.1, k as f64 * 0.1);
            let v = objective(w, b);
            if v < best.0 {
                best = (v, w, b);
            }
        }
    }
    assert!(best.1 > 0.0);
    assert!(objective(fit.weights[0], fit.intercept) < objective(0.0, 0.0));
}

#[test]
fn gaussian_nb_symmetric_classes_score_half() {
    let xs = [0.1, 0.4, 0.9, 0.3];
    let mut vals = Vec::new();
    let mut ys = Vec::new();
    for &x in &xs {
        vals.extend([x, x]);
        ys.extend([0, 1]);
    }
    let d = one_feature(&vals, &ys);
    let m = train(ModelKind::GaussianNb, &d, &Hyperparams::default(), &SeededRng::new(0)).unwrap();
    for x in [0.0, 0.25, 0.5, 1.0] {
        assert!((m.score(&[x]).unwrap() - 0.5).abs() < 1e-12);
    }
    assert!(m.importance().is_none());
}

#[test]
fn forest_is_deterministic() {
    let d = planted(200, &[0, 5], 0.3, 2);
    let hp = Hyperparams::default();
    let a = train(ModelKind::RandomForest, &d, &hp, &SeededRng::new(13)).unwrap();
    let b = train(ModelKind::RandomForest, &d, &hp, &SeededRng::new(13)).unwrap();
    assert_eq!(a, b);
    let ModelParams::Forest(f) = a.params() else { panic!() };
    assert_eq!(f.trees.len(), hp.forest.n_trees);
    assert!(f.trees.iter().all(|t| t.depth() <= hp.forest.max_depth));
    assert_eq!(a.predict_labels(&d).unwrap(), b.predict_labels(&d).unwrap());
}

#[test]
fn knn_one_neighbour_returns_stored_label() {
    let d = planted(30, &[0], 0.2, 4);
    let mut hp = Hyperparams::default();
    hp.knn.k = 1;
    let m = train(ModelKind::Knn, &d, &hp, &SeededRng::new(0)).unwrap();
    for x in d.rows().take(20) {
        let (label, score) = m.predict(x).unwrap();
        // an exact duplicate stored earlier wins the distance tie
        let first = d.rows().position(|r| r == x).unwrap();
        assert_eq!(label, d.labels()[first]);
        assert!(score == 0.0 || score == 1.0);
    }
    assert!(m.importance().is_none());
}

#[test]
fn knn_even_vote_tie_is_positive() {
    let d = one_feature(&[0.0, 1.0, 0.4, 0.6], &[0, 1, 0, 1]);
    let mut hp = Hyperparams::default();
    hp.knn.k = 2;
    let m = train(ModelKind::Knn, &d, &hp, &SeededRng::new(0)).unwrap();
    assert_eq!(m.predict(&[0.5]).unwrap(), (1, 0.5));
}

#[test]
fn training_preconditions() {
    let raw = hdsurvey::synthesize(&hdsurvey::SynthSpec {
        n_neg: 10,
        n_pos: 10,
        signal_features: vec![],
        signal_strength: 0.0,
        seed: 0,
    })
    .unwrap();
    let hp = Hyperparams::default();
    let rng = SeededRng::new(0);
    assert!(matches!(
        train(ModelKind::LogReg, &raw, &hp, &rng),
        Err(Error::NotNormalized)
    ));
    let single = hdsurvey::synthesize(&hdsurvey::SynthSpec {
        n_neg: 10,
        n_pos: 0,
        signal_features: vec![],
        signal_strength: 0.0,
        seed: 0,
    })
    .unwrap()
    .normalize()
    .unwrap();
    for kind in ModelKind::ALL {
        assert!(matches!(train(kind, &single, &hp, &rng), Err(Error::SingleClass)));
    }
    let mut diverging = hp.clone();
    diverging.logreg.learning_rate = 1e308;
    let norm = raw.normalize().unwrap();
    assert!(matches!(
        train(ModelKind::LogReg, &norm, &diverging, &rng),
        Err(Error::NonFiniteLoss { .. })
    ));
}

#[test]
fn planted_signal_gets_maximal_importance() {
    let d = planted(1000, &[0], 1.0, 21);
    let hp = Hyperparams::default();
    for kind in ModelKind::SELECTORS {
        let start = Instant::now();
        let m = train(kind, &d, &hp, &SeededRng::new(5)).unwrap();
        let imp = m.importance().unwrap();
        assert_eq!(top_k(&imp, 1).unwrap(), vec![0], "{kind}: {:?}", imp.weights());
        eprintln!("{kind}: trained in {:?}", start.elapsed());
    }
}

#[test]
fn separable_planted_data_is_fit_by_every_model() {
    let d = planted(1000, &[0], 1.0, 22);
    let hp = Hyperparams::default();
    for kind in ModelKind::ALL {
        let m = train(kind, &d, &hp, &SeededRng::new(6)).unwrap();
        let acc = accuracy(&m, &d);
        assert!(acc >= 0.99, "{kind}: training accuracy {acc}");
    }
}

#[test]
fn pure_noise_stays_near_chance() {
    let (train_set, test_set) = planted_split(1000, &[], 0.0, 31);
    let hp = Hyperparams::default();
    for kind in ModelKind::ALL {
        let m = train(kind, &train_set, &hp, &SeededRng::new(7)).unwrap();
        let acc = accuracy(&m, &test_set);
        assert!(acc <= 0.55, "{kind}: test accuracy {acc} on noise");
    }
}

#[test]
fn serialized_models_round_trip_exactly() {
    let d = planted(60, &[0, 2], 0.5, 3);
    let hp = Hyperparams {
        forest: hdsurvey::classifiers::ForestParams {
            n_trees: 5,
            ..Hyperparams::default().forest
        },
        ..Hyperparams::default()
    };
    for kind in ModelKind::ALL {
        let m = train(kind, &d, &hp, &SeededRng::new(1)).unwrap();
        let back = TrainedModel::from_json(&m.to_json()).unwrap();
        assert_eq!(m, back, "{kind}");
        for x in d.rows() {
            assert_eq!(m.predict(x).unwrap(), back.predict(x).unwrap());
        }
    }
    assert!(TrainedModel::from_json("{\"format\":\"other\",\"version\":1}").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) })]

    #[test]
    fn scores_are_probabilities(seed in 0u64..1000, x in proptest::collection::vec(0.0f64..=1.0, 21)) {
        let d = planted(20, &[1], 0.6, seed);
        let hp = Hyperparams {
            forest: hdsurvey::classifiers::ForestParams { n_trees: 7, ..Hyperparams::default().forest },
            boost: hdsurvey::classifiers::BoostParams { rounds: 10, ..Hyperparams::default().boost },
            ..Hyperparams::default()
        };
        for kind in ModelKind::ALL {
            let m = train(kind, &d, &hp, &SeededRng::new(seed)).unwrap();
            let (label, score) = m.predict(&x).unwrap();
            prop_assert!((0.0..=1.0).contains(&score));
            prop_assert_eq!(label == 1, score >= 0.5);
            if let Some(imp) = m.importance() {
                let total: f64 = imp.weights().iter().sum();
                prop_assert!((total - 1.0).abs() <= 1e-12);
                prop_assert!(imp.weights().iter().all(|&w| w >= 0.0));
            }
        }
    }

    #[test]
    fn ranking_is_scale_invariant(
        w in proptest::collection::vec(-5.0f64..5.0, 21),
        c in 1e-3f64..1e3,
        k in 1usize..=21,
    ) {
        let names: Vec<String> = (0..21).map(|j| format!("q{j}")).collect();
        let base = TrainedModel::from_linear(
            ModelKind::LogReg, names.clone(), LinearModel { weights: w.clone(), intercept: 0.0 }).unwrap();
        let scaled = TrainedModel::from_linear(
            ModelKind::LogReg, names, LinearModel { weights: w.iter().map(|v| v * c).collect(), intercept: 0.0 }).unwrap();
        prop_assert_eq!(
            top_k(&base.importance().unwrap(), k).unwrap(),
            top_k(&scaled.importance().unwrap(), k).unwrap()
        );
    }

    #[test]
    fn top_k_is_a_descending_prefix(w in proptest::collection::vec(0.0f64..1.0, 1..30)) {
        let imp = FeatureImportance::from_raw(&w);
        let all = top_k(&imp, w.len()).unwrap();
        let mut sorted = all.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..w.len()).collect::<Vec<_>>());
        for pair in all.windows(2) {
            let (a, b) = (imp.weights()[pair[0]], imp.weights()[pair[1]]);
            prop_assert!(a > b || (a == b && pair[0] < pair[1]));
        }
    }
}
