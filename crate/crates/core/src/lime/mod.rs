//! Local surrogate explanations for black-box PD scorers.
//!
//! A unit is explained by sampling a Gaussian neighborhood around it, scoring
//! every sample with the black box, weighting samples by an
//! exponential-of-squared-distance kernel, and fitting a weighted ridge
//! surrogate in standardized coordinates. Each feature's contribution is its
//! surrogate coefficient times the unit's standardized value, so
//! `intercept + Σ contributions` reproduces the surrogate prediction exactly.
//! The surrogate is linear and its prediction is not clamped to `[0, 1]`.
//!
//! An optional quartile-bin mode replaces standardized coordinates with
//! "same quartile as the unit" indicators.

mod explain;
mod probe;
mod sampling;
mod stability;

pub use explain::{explain, Contribution, Explanation};
pub use probe::{weakness_probe, ProbeReport, ProbeRow, ProbeSpec, Scenario};
pub use sampling::{sample_neighborhood, Neighborhood};
pub use stability::{jaccard, stability, SeedPolicy, StabilityReport};

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::gbm::BoostedEnsemble;
use crate::linear_models::GlmModel;
use crate::parallel;

/// Anything that maps a feature vector to a PD.
pub trait Blackbox: Sync {
    fn predict(&self, x: &[f64]) -> f64;

    /// Expected input width, when known.
    fn n_features(&self) -> Option<usize> {
        None
    }

    /// Scores every `width`-long row of a row-major buffer, in order.
    fn predict_rows(&self, rows: &[f64], width: usize) -> Vec<f64> {
        parallel::map_rows(rows, width, |x| self.predict(x))
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Blackbox for F {
    fn predict(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

impl Blackbox for BoostedEnsemble {
    fn predict(&self, x: &[f64]) -> f64 {
        self.predict_pd(x).unwrap_or(f64::NAN)
    }

    fn n_features(&self) -> Option<usize> {
        Some(BoostedEnsemble::n_features(self))
    }
}

impl Blackbox for GlmModel {
    fn predict(&self, x: &[f64]) -> f64 {
        self.predict_pd(x).unwrap_or(f64::NAN)
    }

    fn n_features(&self) -> Option<usize> {
        Some(GlmModel::n_features(self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Perturbation {
    /// Gaussian noise in standardized feature space.
    #[default]
    Continuous,
    /// Resample training quartile bins; regress on bin-match indicators.
    QuartileBins,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimeConfig {
    pub n_samples: usize,
    /// `None` resolves to `0.75·√p`.
    pub kernel_width: Option<f64>,
    pub n_features_shown: usize,
    pub lambda: f64,
    pub seed: u64,
    pub perturbation: Perturbation,
    /// Mean top-k Jaccard overlap at or above which repeated explanations
    /// count as similar.
    pub stable_overlap: f64,
}

impl Default for LimeConfig {
    fn default() -> Self {
        Self {
            n_samples: 5000,
            kernel_width: None,
            n_features_shown: 7,
            lambda: 1.0,
            seed: 0,
            perturbation: Perturbation::Continuous,
            stable_overlap: 0.7,
        }
    }
}

impl LimeConfig {
    pub fn resolved_kernel_width(&self, n_features: usize) -> f64 {
        self.kernel_width
            .unwrap_or_else(|| 0.75 * (n_features as f64).sqrt())
    }
}

/// Training quartile bins of one feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuartileBins {
    /// Upper edges of the first three bins (`x <= edge`).
    pub edges: [f64; 3],
    pub counts: [usize; 4],
    pub means: [f64; 4],
    pub stds: [f64; 4],
    pub lows: [f64; 4],
    pub highs: [f64; 4],
}

impl QuartileBins {
    pub fn bin_of(&self, x: f64) -> usize {
        self.edges.iter().take_while(|&&e| x > e).count()
    }

    fn from_column(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        let n = values.len();
        let quantile = |q: f64| {
            let pos = q * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            values[lo] + (pos - lo as f64) * (values[hi] - values[lo])
        };
        let edges = [quantile(0.25), quantile(0.5), quantile(0.75)];
        let mut bins = QuartileBins {
            edges,
            counts: [0; 4],
            means: [0.0; 4],
            stds: [0.0; 4],
            lows: [f64::INFINITY; 4],
            highs: [f64::NEG_INFINITY; 4],
        };
        for &v in &values {
            let b = bins.bin_of(v);
            bins.counts[b] += 1;
            bins.means[b] += v;
            bins.lows[b] = bins.lows[b].min(v);
            bins.highs[b] = bins.highs[b].max(v);
        }
        for b in 0..4 {
            if bins.counts[b] > 0 {
                bins.means[b] /= bins.counts[b] as f64;
            } else {
                bins.lows[b] = 0.0;
                bins.highs[b] = 0.0;
            }
        }
        for &v in &values {
            let b = bins.bin_of(v);
            bins.stds[b] += (v - bins.means[b]).powi(2);
        }
        for b in 0..4 {
            if bins.counts[b] > 0 {
                bins.stds[b] = (bins.stds[b] / bins.counts[b] as f64).sqrt();
            }
        }
        bins
    }
}

/// Per-feature training statistics that define the sampling scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub names: Vec<String>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub bins: Option<Vec<QuartileBins>>,
}

impl FeatureStats {
    /// Means and population standard deviations, plus quartile bins.
    pub fn from_dataset(data: &Dataset) -> Self {
        let summary = crate::dataset::summarize(data);
        let bins = (data.n_rows() > 0).then(|| {
            (0..data.n_features())
                .map(|j| QuartileBins::from_column(data.rows().map(|r| r[j]).collect()))
                .collect()
        });
        Self {
            names: summary.features.iter().map(|f| f.name.clone()).collect(),
            means: summary.features.iter().map(|f| f.mean).collect(),
            stds: summary.features.iter().map(|f| f.std).collect(),
            bins,
        }
    }

    /// Unit-scale statistics (mean 0, std 1) for `p` features.
    pub fn standard(p: usize) -> Self {
        Self {
            names: (0..p).map(|j| format!("x{j}")).collect(),
            means: vec![0.0; p],
            stds: vec![1.0; p],
            bins: None,
        }
    }

    pub fn n_features(&self) -> usize {
        self.means.len()
    }
}
