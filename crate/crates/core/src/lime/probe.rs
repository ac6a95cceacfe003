use serde::{Deserialize, Serialize};

use super::explain::explain;
use super::stability::{stability, SeedPolicy, StabilityReport};
use super::{FeatureStats, LimeConfig};
use crate::dataset::{generate_synthetic, split, Nonlinearity, SplitSpec, SyntheticSpec};
use crate::gbm::{fit_gbm, GbmConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    HighDim,
    Correlated,
    KernelSweep,
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "high_dim" | "high-dim" => Ok(Self::HighDim),
            "correlated" => Ok(Self::Correlated),
            "kernel_sweep" | "kernel-sweep" => Ok(Self::KernelSweep),
            other => Err(Error::InvalidArgument(format!("unknown scenario {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeSpec {
    pub n_rows: usize,
    pub bad_rate: f64,
    pub nonlinearity: Nonlinearity,
    /// Feature counts visited by `HighDim`.
    pub dims: Vec<usize>,
    /// Correlation held fixed by `HighDim`.
    pub base_correlation: f64,
    /// Correlations visited by `Correlated`.
    pub correlations: Vec<f64>,
    /// Feature count held fixed by `Correlated`.
    pub base_dim: usize,
    /// Multiples of the default kernel width visited by `KernelSweep`.
    pub width_multipliers: Vec<f64>,
    /// Unit explained by `KernelSweep` on `f(x) = |x|`.
    pub sweep_unit: f64,
    /// Train share of the stratified split; the GBM sees only the train part.
    pub train_fraction: f64,
    /// Leading test rows that get explained.
    pub units: usize,
    pub runs: usize,
    pub gbm: GbmConfig,
    pub lime: LimeConfig,
    pub seed: u64,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        Self {
            n_rows: 56_311,
            bad_rate: 0.03,
            nonlinearity: Nonlinearity::Nonlinear,
            dims: vec![10, 20, 50, 100],
            base_correlation: 0.0,
            correlations: vec![0.0, 0.5, 0.9],
            base_dim: 20,
            width_multipliers: vec![0.1, 0.5, 1.0, 2.0, 5.0],
            sweep_unit: 0.01,
            train_fraction: 0.7,
            units: 100,
            runs: 3,
            gbm: GbmConfig::default(),
            lime: LimeConfig::default(),
            seed: 0,
        }
    }
}

impl ProbeSpec {
    fn validate(&self, scenario: Scenario) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        match scenario {
            Scenario::HighDim if self.dims.is_empty() => return bad("dims must not be empty"),
            Scenario::Correlated if self.correlations.is_empty() => return bad("correlations must not be empty"),
            Scenario::KernelSweep => {
                if self.width_multipliers.is_empty() {
                    return bad("width_multipliers must not be empty");
                }
                if self.width_multipliers.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
                    return bad("width multipliers must be positive");
                }
                return Ok(());
            }
            _ => {}
        }
        if self.units == 0 {
            return bad("units must be positive");
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return bad("train_fraction must lie in (0,1)");
        }
        if self.runs < 2 {
            return bad("runs must be at least 2");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    /// Name of the varied parameter.
    pub parameter: String,
    pub value: f64,
    /// Mean top-k Jaccard overlap, averaged over units.
    pub overlap: Option<f64>,
    /// Mean per-feature contribution dispersion, averaged over units.
    pub dispersion: Option<f64>,
    pub mean_abs_top_contribution: Option<f64>,
    pub r_squared: f64,
    /// Local slope in original units (kernel sweep only).
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub scenario: Scenario,
    pub spec: ProbeSpec,
    pub rows: Vec<ProbeRow>,
}

/// Stresses LIME along one axis: dimensionality, feature correlation or
/// kernel width.
pub fn weakness_probe(scenario: Scenario, spec: &ProbeSpec) -> Result<ProbeReport> {
    spec.validate(scenario)?;
    let rows = match scenario {
        Scenario::HighDim => spec
            .dims
            .iter()
            .map(|&p| stability_row(spec, "n_features", p as f64, p, spec.base_correlation))
            .collect::<Result<_>>()?,
        Scenario::Correlated => spec
            .correlations
            .iter()
            .map(|&rho| stability_row(spec, "correlation", rho, spec.base_dim, rho))
            .collect::<Result<_>>()?,
        Scenario::KernelSweep => kernel_sweep(spec)?,
    };
    Ok(ProbeReport { scenario, spec: spec.clone(), rows })
}

/// Trains a GBM on the train part of a fresh synthetic portfolio and averages
/// stability reports over the leading test units.
fn stability_row(spec: &ProbeSpec, parameter: &str, value: f64, p: usize, correlation: f64) -> Result<ProbeRow> {
    let data = generate_synthetic(&SyntheticSpec {
        n_rows: spec.n_rows,
        n_features: p,
        bad_rate_target: spec.bad_rate,
        nonlinearity: spec.nonlinearity,
        correlation,
        seed: spec.seed,
    })?;
    let (train, test) = split(
        &data,
        &SplitSpec { train_fraction: spec.train_fraction, seed: spec.seed, ..Default::default() },
    )?;
    if spec.units > test.n_rows() {
        return Err(Error::InvalidArgument(format!(
            "{} units requested but the test split has {} rows",
            spec.units,
            test.n_rows()
        )));
    }
    let model = fit_gbm(&train, &spec.gbm)?;
    let stats = FeatureStats::from_dataset(&train);
    let reports: Vec<StabilityReport> = (0..spec.units)
        .map(|i| {
            stability(&model, &test.row_ids()[i], test.row(i), &stats, &spec.lime, spec.runs, SeedPolicy::Increment)
        })
        .collect::<Result<_>>()?;
    let mean = |f: &dyn Fn(&StabilityReport) -> f64| reports.iter().map(f).sum::<f64>() / reports.len() as f64;
    Ok(ProbeRow {
        parameter: parameter.to_string(),
        value,
        overlap: Some(mean(&|r| r.topk_overlap)),
        dispersion: Some(mean(&|r| r.mean_dispersion())),
        mean_abs_top_contribution: Some(mean(&|r| r.mean_abs_top_contribution)),
        r_squared: mean(&|r| r.mean_r_squared),
        slope: None,
    })
}

fn kernel_sweep(spec: &ProbeSpec) -> Result<Vec<ProbeRow>> {
    let stats = FeatureStats::standard(1);
    let blackbox = |x: &[f64]| x[0].abs();
    let default_width = spec.lime.resolved_kernel_width(1);
    spec.width_multipliers
        .iter()
        .map(|&m| {
            let config = LimeConfig { kernel_width: Some(m * default_width), seed: spec.seed, ..spec.lime };
            let e = explain(&blackbox, "sweep", &[spec.sweep_unit], &stats, &config)?;
            Ok(ProbeRow {
                parameter: "width_multiplier".to_string(),
                value: m,
                overlap: None,
                dispersion: None,
                mean_abs_top_contribution: None,
                r_squared: e.surrogate_r_squared,
                slope: e.local_slopes.map(|s| s[0]),
            })
        })
        .collect()
}
