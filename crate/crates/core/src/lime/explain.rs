use serde::{Deserialize, Serialize};

use super::sampling::sample_neighborhood;
use super::{Blackbox, FeatureStats, LimeConfig, Perturbation};
use crate::linear_models::fit_ridge;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub feature: String,
    pub index: usize,
    /// Surrogate coefficient times the unit's interpretable value. Positive
    /// values push towards default.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub unit_id: String,
    pub blackbox_prediction: f64,
    /// Surrogate evaluated at the unit; may fall outside `[0, 1]`.
    pub surrogate_prediction: f64,
    pub intercept: f64,
    /// Top `n_features_shown` contributions, largest magnitude first.
    pub contributions: Vec<Contribution>,
    /// Every feature's contribution, in the same order.
    pub all_contributions: Vec<Contribution>,
    pub surrogate_r_squared: f64,
    pub kernel_width: f64,
    /// Surrogate slope per feature in original units (continuous mode only).
    pub local_slopes: Option<Vec<f64>>,
    pub config: LimeConfig,
}

impl Explanation {
    /// Contribution of feature `index`.
    pub fn contribution_of(&self, index: usize) -> f64 {
        self.all_contributions
            .iter()
            .find(|c| c.index == index)
            .map_or(0.0, |c| c.value)
    }

    /// `intercept + Σ all contributions`, in ranked order.
    pub fn reconstruct(&self) -> f64 {
        self.intercept + self.all_contributions.iter().map(|c| c.value).sum::<f64>()
    }

    pub fn top_features(&self) -> Vec<usize> {
        self.contributions.iter().map(|c| c.index).collect()
    }
}

/// Explains `blackbox` at `unit` with a kernel-weighted ridge surrogate.
pub fn explain<B: Blackbox + ?Sized>(
    blackbox: &B,
    unit_id: &str,
    unit: &[f64],
    stats: &FeatureStats,
    config: &LimeConfig,
) -> Result<Explanation> {
    let p = stats.n_features();
    if let Some(expected) = blackbox.n_features() {
        if expected != p {
            return Err(Error::DimensionMismatch { expected, actual: p });
        }
    }
    let nb = sample_neighborhood(unit, stats, config)?;
    let responses = blackbox.predict_rows(&nb.samples, p);
    if let Some(i) = responses.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("black-box prediction for neighborhood sample {i}")));
    }
    let ridge = fit_ridge(&nb.design, p, &responses, &nb.weights, config.lambda)?;

    let mut all: Vec<Contribution> = (0..p)
        .map(|j| Contribution {
            feature: stats.names[j].clone(),
            index: j,
            value: ridge.slopes()[j] * nb.unit_design[j],
        })
        .collect();
    let surrogate_prediction = ridge.predict(&nb.unit_design);
    all.sort_by(|a, b| b.value.abs().total_cmp(&a.value.abs()).then(a.index.cmp(&b.index)));
    let shown = all.iter().take(config.n_features_shown).cloned().collect();

    let local_slopes = (config.perturbation == Perturbation::Continuous)
        .then(|| ridge.slopes().iter().zip(&stats.stds).map(|(b, s)| b / s).collect());

    Ok(Explanation {
        unit_id: unit_id.to_string(),
        blackbox_prediction: responses[0],
        surrogate_prediction,
        intercept: ridge.intercept(),
        contributions: shown,
        all_contributions: all,
        surrogate_r_squared: ridge.r_squared,
        kernel_width: nb.kernel_width,
        local_slopes,
        config: *config,
    })
}
