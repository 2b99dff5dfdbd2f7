//! Balanced undersampling and stratified train/test splits.

use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Default held-out share.
pub const DEFAULT_TEST_FRACTION: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub n_per_class: usize,
    pub seed: u64,
}

/// Source-row indices of a balanced sample, in output order.
pub fn balanced_sample_indices(d: &Dataset, spec: SampleSpec) -> Result<Vec<usize>> {
    let (neg, pos) = d.class_indices();
    for (class, members) in [("negative", &neg), ("positive", &pos)] {
        if members.len() < spec.n_per_class {
            return Err(Error::InsufficientClass {
                class,
                available: members.len(),
                requested: spec.n_per_class,
            });
        }
    }
    let mut rng = SeededRng::new(spec.seed);
    let mut rows = Vec::with_capacity(2 * spec.n_per_class);
    for members in [&neg, &pos] {
        rows.extend(
            index::sample(&mut rng, members.len(), spec.n_per_class)
                .into_iter()
                .map(|k| members[k]),
        );
    }
    rows.shuffle(&mut rng);
    Ok(rows)
}

/// Draws `n_per_class` rows of each class uniformly without replacement and
/// shuffles the result.
pub fn balanced_sample(d: &Dataset, spec: SampleSpec) -> Result<Dataset> {
    balanced_sample_indices(d, spec).map(|rows| d.subset(&rows))
}

/// Row indices of a stratified split: `(train, test)`.
pub fn split_indices(d: &Dataset, test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "test fraction {test_fraction} not in (0, 1)"
        )));
    }
    let (neg, pos) = d.class_indices();
    for (class, members) in [("negative", &neg), ("positive", &pos)] {
        if members.len() < 2 {
            return Err(Error::InsufficientClass {
                class,
                available: members.len(),
                requested: 2,
            });
        }
    }
    let mut rng = SeededRng::new(seed);
    let mut train = Vec::with_capacity(d.n_rows());
    let mut test = Vec::new();
    for mut members in [neg, pos] {
        members.shuffle(&mut rng);
        let n_test = (test_fraction * members.len() as f64).round() as usize;
        test.extend_from_slice(&members[..n_test]);
        train.extend_from_slice(&members[n_test..]);
    }
    if train.is_empty() {
        return Err(Error::DegenerateSplit {
            fraction: test_fraction,
            side: "training",
        });
    }
    if test.is_empty() {
        return Err(Error::DegenerateSplit {
            fraction: test_fraction,
            side: "test",
        });
    }
    train.shuffle(&mut rng);
    test.shuffle(&mut rng);
    Ok((train, test))
}

/// Stratified split: each class contributes `round(test_fraction * size)`
/// rows to the test side.
pub fn train_test_split(d: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let (train, test) = split_indices(d, test_fraction, seed)?;
    Ok((d.subset(&train), d.subset(&test)))
}
