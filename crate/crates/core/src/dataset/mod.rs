//! Tabular credit data: a row-major feature matrix, a binary default target
//! (1 = default), feature names and opaque row identifiers.

mod csv_io;
mod split;
mod synthetic;

pub use csv_io::{load_csv, read_csv, write_csv, ROW_ID_COLUMN};
pub use split::{split, SplitSpec};
pub use synthetic::{generate_synthetic, generate_with_truth, GroundTruth, Nonlinearity, SyntheticSpec};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    n_rows: usize,
    n_features: usize,
    target: Vec<u8>,
    feature_names: Vec<String>,
    row_ids: Vec<String>,
}

impl Dataset {
    /// Builds a dataset, checking every structural invariant.
    pub fn new(
        features: Vec<f64>,
        target: Vec<u8>,
        feature_names: Vec<String>,
        row_ids: Vec<String>,
    ) -> Result<Self> {
        let n_rows = target.len();
        let n_features = feature_names.len();
        if features.len() != n_rows * n_features {
            return Err(Error::DimensionMismatch {
                expected: n_rows * n_features,
                actual: features.len(),
            });
        }
        if row_ids.len() != n_rows {
            return Err(Error::DimensionMismatch {
                expected: n_rows,
                actual: row_ids.len(),
            });
        }
        if let Some(row) = target.iter().position(|&y| y > 1) {
            return Err(Error::NonBinaryTarget {
                row,
                value: target[row].to_string(),
            });
        }
        if let Some(i) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::MissingValue {
                row: i / n_features,
                column: feature_names[i % n_features].clone(),
            });
        }
        Ok(Self {
            features,
            n_rows,
            n_features,
            target,
            feature_names,
            row_ids,
        })
    }

    /// Same as [`Dataset::new`] with row ids `"0"`, `"1"`, ….
    pub fn from_rows(features: Vec<f64>, target: Vec<u8>, feature_names: Vec<String>) -> Result<Self> {
        let ids = (0..target.len()).map(|i| i.to_string()).collect();
        Self::new(features, target, feature_names, ids)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn target(&self) -> &[u8] {
        &self.target
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.features[row * self.n_features + feature]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        // chunks(0) panics, and a p = 0 dataset still has n (empty) rows
        let p = self.n_features;
        (0..self.n_rows).map(move |i| &self.features[i * p..(i + 1) * p])
    }

    pub fn n_bad(&self) -> usize {
        self.target.iter().filter(|&&y| y == 1).count()
    }

    /// Share of defaults; NaN for an empty dataset.
    pub fn bad_rate(&self) -> f64 {
        self.n_bad() as f64 / self.n_rows as f64
    }

    /// Fails unless both classes occur.
    pub fn require_both_classes(&self) -> Result<()> {
        let bad = self.n_bad();
        if bad == 0 {
            Err(Error::SingleClass(0))
        } else if bad == self.n_rows {
            Err(Error::SingleClass(1))
        } else {
            Ok(())
        }
    }

    /// New dataset holding the given rows, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(rows.len() * self.n_features);
        for &r in rows {
            features.extend_from_slice(self.row(r));
        }
        Dataset {
            features,
            n_rows: rows.len(),
            n_features: self.n_features,
            target: rows.iter().map(|&r| self.target[r]).collect(),
            feature_names: self.feature_names.clone(),
            row_ids: rows.iter().map(|&r| self.row_ids[r].clone()).collect(),
        }
    }

    /// Applies `f(feature_index, value)` to every cell.
    pub fn map_features(&self, f: impl Fn(usize, f64) -> f64) -> Result<Dataset> {
        let p = self.n_features;
        let features = self
            .features
            .iter()
            .enumerate()
            .map(|(i, &v)| f(i % p, v))
            .collect();
        Dataset::new(
            features,
            self.target.clone(),
            self.feature_names.clone(),
            self.row_ids.clone(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSummary {
    pub name: String,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub n_rows: usize,
    pub n_features: usize,
    pub n_bad: usize,
    pub bad_rate: f64,
    pub features: Vec<FeatureSummary>,
}

pub fn summarize(data: &Dataset) -> DatasetSummary {
    let n = data.n_rows();
    let features = (0..data.n_features())
        .map(|j| {
            let mut sum = 0.0;
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            for row in data.rows() {
                let v = row[j];
                sum += v;
                min = min.min(v);
                max = max.max(v);
            }
            let mean = sum / n as f64;
            let var = data.rows().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n as f64;
            FeatureSummary {
                name: data.feature_names()[j].clone(),
                mean,
                std: var.sqrt(),
                min,
                max,
            }
        })
        .collect();
    DatasetSummary {
        n_rows: n,
        n_features: data.n_features(),
        n_bad: data.n_bad(),
        bad_rate: data.bad_rate(),
        features,
    }
}
