//! Survey datasets: schema, CSV ingestion, min-max scaling and a synthetic
//! planted-signal generator.

use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Binary,
    Ordinal,
    Continuous,
}

/// One survey question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub name: String,
    pub kind: FeatureKind,
    /// Inclusive lower bound of recorded answers.
    pub min: f64,
    /// Inclusive upper bound of recorded answers.
    pub max: f64,
}

impl Feature {
    pub fn new(name: &str, kind: FeatureKind, min: f64, max: f64) -> Self {
        Self {
            name: name.to_string(),
            kind,
            min,
            max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    #[serde(rename = "label")]
    label_name: String,
    features: Vec<Feature>,
}

/// Column order of the public BRFSS 2015 heart-disease indicators file.
const BRFSS_FEATURES: [(&str, FeatureKind, f64, f64); 21] = [
    ("HighBP", FeatureKind::Binary, 0.0, 1.0),
    ("HighChol", FeatureKind::Binary, 0.0, 1.0),
    ("CholCheck", FeatureKind::Binary, 0.0, 1.0),
    ("BMI", FeatureKind::Continuous, 12.0, 98.0),
    ("Smoker", FeatureKind::Binary, 0.0, 1.0),
    ("Stroke", FeatureKind::Binary, 0.0, 1.0),
    ("Diabetes", FeatureKind::Ordinal, 0.0, 2.0),
    ("PhysActivity", FeatureKind::Binary, 0.0, 1.0),
    ("Fruits", FeatureKind::Binary, 0.0, 1.0),
    ("Veggies", FeatureKind::Binary, 0.0, 1.0),
    ("HvyAlcoholConsump", FeatureKind::Binary, 0.0, 1.0),
    ("AnyHealthcare", FeatureKind::Binary, 0.0, 1.0),
    ("NoDocbcCost", FeatureKind::Binary, 0.0, 1.0),
    ("GenHlth", FeatureKind::Ordinal, 1.0, 5.0),
    ("MentHlth", FeatureKind::Ordinal, 0.0, 30.0),
    ("PhysHlth", FeatureKind::Ordinal, 0.0, 30.0),
    ("DiffWalk", FeatureKind::Binary, 0.0, 1.0),
    ("Sex", FeatureKind::Binary, 0.0, 1.0),
    ("Age", FeatureKind::Ordinal, 1.0, 13.0),
    ("Education", FeatureKind::Ordinal, 1.0, 6.0),
    ("Income", FeatureKind::Ordinal, 1.0, 8.0),
];

pub const BRFSS_LABEL: &str = "HeartDiseaseorAttack";

/// The ten questions retained by the reduced BRFSS questionnaire.
pub const REDUCED_QUESTIONNAIRE: [&str; 10] = [
    "GenHlth", "Age", "HighBP", "HighChol", "Sex", "Stroke", "DiffWalk", "BMI", "Diabetes", "PhysHlth",
];

impl FeatureSchema {
    pub fn new(label_name: impl Into<String>, features: Vec<Feature>) -> Result<Self> {
        let schema = Self {
            label_name: label_name.into(),
            features,
        };
        schema.validate()?;
        Ok(schema)
    }

    /// The 21-question BRFSS heart-disease schema.
    pub fn brfss() -> Self {
        let features = BRFSS_FEATURES
            .iter()
            .map(|&(name, kind, lo, hi)| Feature::new(name, kind, lo, hi))
            .collect();
        Self::new(BRFSS_LABEL, features).expect("built-in schema is valid")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let schema: FeatureSchema = toml::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("schema serializes")
    }

    fn validate(&self) -> Result<()> {
        if self.label_name.trim().is_empty() {
            return Err(Error::Schema("label name is empty".into()));
        }
        let mut seen = HashSet::new();
        seen.insert(self.label_name.as_str());
        for f in &self.features {
            if f.name.trim().is_empty() {
                return Err(Error::Schema("feature name is empty".into()));
            }
            if !seen.insert(f.name.as_str()) {
                return Err(Error::Schema(format!("duplicate column name `{}`", f.name)));
            }
            if !(f.min <= f.max) {
                return Err(Error::Schema(format!(
                    "feature `{}` has min {} > max {}",
                    f.name, f.min, f.max
                )));
            }
        }
        Ok(())
    }

    pub fn label_name(&self) -> &str {
        &self.label_name
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.features.iter().map(|f| f.name.as_str()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    /// Resolves feature names to column indices.
    pub fn indices_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| {
                self.index_of(n.as_ref())
                    .ok_or_else(|| Error::Schema(format!("unknown feature `{}`", n.as_ref())))
            })
            .collect()
    }

    fn select(&self, indices: &[usize]) -> Self {
        Self {
            label_name: self.label_name.clone(),
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
        }
    }
}

/// Per-column min-max transform fitted on a training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    ranges: Vec<(f64, f64)>,
}

impl MinMaxScaler {
    fn fit(d: &Dataset) -> Self {
        let p = d.n_features();
        let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); p];
        for row in d.rows() {
            for (r, &v) in ranges.iter_mut().zip(row) {
                r.0 = r.0.min(v);
                r.1 = r.1.max(v);
            }
        }
        for r in &mut ranges {
            if !r.0.is_finite() {
                *r = (0.0, 0.0);
            }
        }
        Self { ranges }
    }

    pub fn ranges(&self) -> &[(f64, f64)] {
        &self.ranges
    }

    /// Scales one value of column `j`; zero-range columns map to 0 and values
    /// outside the fitted range are clipped to [0, 1].
    pub fn scale(&self, j: usize, v: f64) -> f64 {
        let (lo, hi) = self.ranges[j];
        let span = hi - lo;
        if span > 0.0 {
            ((v - lo) / span).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }

    /// Applies the fitted transform to raw data with the same columns.
    pub fn transform(&self, d: &Dataset) -> Result<Dataset> {
        if d.is_normalized() {
            return Err(Error::AlreadyNormalized);
        }
        if d.n_features() != self.ranges.len() {
            return Err(Error::DimensionMismatch {
                expected: self.ranges.len(),
                found: d.n_features(),
            });
        }
        let p = d.n_features();
        let values = d
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| self.scale(i % p, v))
            .collect();
        Ok(Dataset {
            schema: d.schema.clone(),
            n_rows: d.n_rows,
            values,
            labels: d.labels.clone(),
            scaler: Some(self.clone()),
        })
    }

    fn select(&self, indices: &[usize]) -> Self {
        Self {
            ranges: indices.iter().map(|&i| self.ranges[i]).collect(),
        }
    }
}

/// Feature matrix (row-major) with binary labels.
///
/// Immutable once built. `scaler` is `Some` exactly when the matrix holds
/// min-max scaled values.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: FeatureSchema,
    n_rows: usize,
    values: Vec<f64>,
    labels: Vec<u8>,
    scaler: Option<MinMaxScaler>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub negatives: usize,
    pub positives: usize,
}

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.negatives + self.positives
    }
}

impl Dataset {
    /// Builds an un-normalized dataset from row-major values.
    pub fn new(schema: FeatureSchema, values: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        let p = schema.len();
        if p == 0 {
            return Err(Error::Schema("schema has no features".into()));
        }
        if values.len() != labels.len() * p {
            return Err(Error::DimensionMismatch {
                expected: labels.len() * p,
                found: values.len(),
            });
        }
        if let Some(row) = labels.iter().position(|&l| l > 1) {
            return Err(Error::InvalidLabel {
                row,
                value: labels[row] as f64,
            });
        }
        Ok(Self {
            schema,
            n_rows: labels.len(),
            values,
            labels,
            scaler: None,
        })
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.schema.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_rows == 0
    }

    pub fn is_normalized(&self) -> bool {
        self.scaler.is_some()
    }

    pub fn scaler(&self) -> Option<&MinMaxScaler> {
        self.scaler.as_ref()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let p = self.n_features();
        &self.values[i * p..(i + 1) * p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n_features())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_features() + j]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows().map(move |r| r[j])
    }

    pub fn class_counts(&self) -> ClassCounts {
        let positives = self.labels.iter().filter(|&&l| l == 1).count();
        ClassCounts {
            negatives: self.n_rows - positives,
            positives,
        }
    }

    /// Row indices of each class, in row order: (negatives, positives).
    pub fn class_indices(&self) -> (Vec<usize>, Vec<usize>) {
        let mut neg = Vec::new();
        let mut pos = Vec::new();
        for (i, &l) in self.labels.iter().enumerate() {
            if l == 1 {
                pos.push(i);
            } else {
                neg.push(i);
            }
        }
        (neg, pos)
    }

    /// New dataset made of the given rows, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        let p = self.n_features();
        let mut values = Vec::with_capacity(rows.len() * p);
        for &i in rows {
            values.extend_from_slice(self.row(i));
        }
        Dataset {
            schema: self.schema.clone(),
            n_rows: rows.len(),
            values,
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
            scaler: self.scaler.clone(),
        }
    }

    /// Keeps only the listed columns, in the listed order.
    pub fn select_features(&self, selected: &[usize]) -> Result<Dataset> {
        if selected.is_empty() {
            return Err(Error::EmptySelection);
        }
        let p = self.n_features();
        let mut seen = vec![false; p];
        for &j in selected {
            if j >= p {
                return Err(Error::FeatureIndex { index: j, count: p });
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(Error::DuplicateFeature(j));
            }
        }
        let mut values = Vec::with_capacity(self.n_rows * selected.len());
        for row in self.rows() {
            values.extend(selected.iter().map(|&j| row[j]));
        }
        Ok(Dataset {
            schema: self.schema.select(selected),
            n_rows: self.n_rows,
            values,
            labels: self.labels.clone(),
            scaler: self.scaler.as_ref().map(|s| s.select(selected)),
        })
    }

    /// Min-max scales every column into [0, 1] and records the per-column
    /// ranges so held-out data can be scaled identically.
    pub fn normalize(&self) -> Result<Dataset> {
        if self.is_normalized() {
            return Err(Error::AlreadyNormalized);
        }
        let scaler = MinMaxScaler::fit(self);
        let mut out = scaler.transform(self)?;
        out.scaler = Some(scaler);
        Ok(out)
    }

    /// Writes the dataset as CSV: label column first, then features.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec![self.schema.label_name.as_str()];
        header.extend(self.schema.names());
        w.write_record(&header).map_err(|e| Error::Csv(e.to_string()))?;
        let mut record = Vec::with_capacity(header.len());
        for (row, &label) in self.rows().zip(&self.labels) {
            record.clear();
            record.push(label.to_string());
            record.extend(row.iter().map(|v| format!("{v:?}")));
            w.write_record(&record).map_err(|e| Error::Csv(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }
}

/// What to do with a value outside its schema range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RangeCheck {
    #[default]
    Error,
    Warn,
}

/// Loads a CSV with strict range checking.
pub fn load_csv(path: impl AsRef<Path>, schema: &FeatureSchema) -> Result<Dataset> {
    load_csv_with(path, schema, RangeCheck::Error).map(|(d, _)| d)
}

/// Loads a CSV; under [`RangeCheck::Warn`] out-of-range values are kept and
/// reported in the returned warning list.
pub fn load_csv_with(
    path: impl AsRef<Path>,
    schema: &FeatureSchema,
    check: RangeCheck,
) -> Result<(Dataset, Vec<Error>)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, schema, check)
}

pub fn read_csv<R: Read>(reader: R, schema: &FeatureSchema, check: RangeCheck) -> Result<(Dataset, Vec<Error>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::Csv(e.to_string()))?.clone();
    if header.is_empty() {
        // zero-byte input: an empty table rather than a header error
        return Ok((Dataset::new(schema.clone(), Vec::new(), Vec::new())?, Vec::new()));
    }

    let label_col = header
        .iter()
        .position(|h| h == schema.label_name())
        .ok_or_else(|| Error::HeaderMismatch {
            index: 0,
            expected: schema.label_name().to_string(),
            found: header.get(0).unwrap_or("").to_string(),
        })?;
    // Feature columns are the header minus the label, in schema order.
    let feature_cols: Vec<usize> = (0..header.len()).filter(|&c| c != label_col).collect();
    for (k, f) in schema.features().iter().enumerate() {
        match feature_cols.get(k) {
            Some(&c) if &header[c] == f.name.as_str() => {}
            Some(&c) => {
                return Err(Error::HeaderMismatch {
                    index: c,
                    expected: f.name.clone(),
                    found: header[c].to_string(),
                })
            }
            None => {
                return Err(Error::HeaderMismatch {
                    index: header.len(),
                    expected: f.name.clone(),
                    found: String::new(),
                })
            }
        }
    }
    if feature_cols.len() > schema.len() {
        let c = feature_cols[schema.len()];
        return Err(Error::HeaderMismatch {
            index: c,
            expected: String::new(),
            found: header[c].to_string(),
        });
    }

    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut warnings = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Csv(e.to_string()))?;
        let parse = |c: usize, column: &str| -> Result<f64> {
            let cell = rec.get(c).unwrap_or("");
            if cell.is_empty() {
                return Err(Error::MissingValue {
                    row: r,
                    column: column.to_string(),
                });
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::NonNumeric {
                    row: r,
                    column: column.to_string(),
                    value: cell.to_string(),
                }),
            }
        };
        let label = parse(label_col, schema.label_name())?;
        let label = if label == 0.0 {
            0
        } else if label == 1.0 {
            1
        } else {
            return Err(Error::InvalidLabel { row: r, value: label });
        };
        labels.push(label);
        for (f, &c) in schema.features().iter().zip(&feature_cols) {
            let v = parse(c, &f.name)?;
            if v < f.min || v > f.max {
                let err = Error::OutOfRange {
                    row: r,
                    column: f.name.clone(),
                    value: v,
                    lo: f.min,
                    hi: f.max,
                };
                match check {
                    RangeCheck::Error => return Err(err),
                    RangeCheck::Warn => warnings.push(err),
                }
            }
            values.push(v);
        }
    }
    Ok((Dataset::new(schema.clone(), values, labels)?, warnings))
}

/// Parameters of the planted-signal generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_neg: usize,
    pub n_pos: usize,
    pub signal_features: Vec<usize>,
    /// In [0, 1]; 0 makes every feature independent of the label.
    pub signal_strength: f64,
    pub seed: u64,
}

/// Generates a raw (un-normalized) dataset on the BRFSS schema.
pub fn synthesize(spec: &SynthSpec) -> Result<Dataset> {
    synthesize_with_schema(&FeatureSchema::brfss(), spec)
}

/// Planted-signal generator.
///
/// Each cell starts from `u ~ U(0, 1)`. For a signal feature the latent value
/// is `(1 - s) * u + s * y` with `y` the row label, otherwise it is `u`.
/// The latent value is mapped onto the feature's range and rounded to the
/// integer grid for binary and ordinal kinds. At `s = 1` every signal feature
/// equals the label's end of its range, so each one separates the classes.
pub fn synthesize_with_schema(schema: &FeatureSchema, spec: &SynthSpec) -> Result<Dataset> {
    let p = schema.len();
    let mut is_signal = vec![false; p];
    for &j in &spec.signal_features {
        if j >= p {
            return Err(Error::FeatureIndex { index: j, count: p });
        }
        is_signal[j] = true;
    }
    if !(0.0..=1.0).contains(&spec.signal_strength) {
        return Err(Error::InvalidParameter(format!(
            "signal strength {} not in [0, 1]",
            spec.signal_strength
        )));
    }
    let s = spec.signal_strength;
    let mut rng = SeededRng::new(spec.seed);
    let mut labels: Vec<u8> = std::iter::repeat_n(0, spec.n_neg)
        .chain(std::iter::repeat_n(1, spec.n_pos))
        .collect();
    labels.shuffle(&mut rng);

    let mut values = Vec::with_capacity(labels.len() * p);
    for &y in &labels {
        for (j, f) in schema.features().iter().enumerate() {
            let u: f64 = rng.gen();
            let latent = if is_signal[j] { (1.0 - s) * u + s * y as f64 } else { u };
            let span = f.max - f.min;
            let v = match f.kind {
                FeatureKind::Continuous => f.min + latent * span,
                FeatureKind::Binary | FeatureKind::Ordinal => f.min + (latent * span).round(),
            };
            values.push(v);
        }
    }
    Dataset::new(schema.clone(), values, labels)
}
