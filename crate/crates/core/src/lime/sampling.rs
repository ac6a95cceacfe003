use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{FeatureStats, LimeConfig, Perturbation};
use crate::{Error, Result};

/// A sampled neighborhood. All matrices are row-major, `n_samples × p`;
/// row 0 is the unit itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood {
    /// Points in original feature units, as sent to the black box.
    pub samples: Vec<f64>,
    /// Surrogate design: standardized coordinates, or bin-match indicators.
    pub design: Vec<f64>,
    /// The unit's own row of `design`.
    pub unit_design: Vec<f64>,
    pub weights: Vec<f64>,
    pub kernel_width: f64,
}

/// Draws `config.n_samples` points around `unit`.
///
/// In continuous mode each feature receives independent Gaussian noise with
/// that feature's training standard deviation, and the kernel weight is
/// `exp(−d²/width²)` with `d` the Euclidean distance to the unit in
/// standardized coordinates.
pub fn sample_neighborhood(unit: &[f64], stats: &FeatureStats, config: &LimeConfig) -> Result<Neighborhood> {
    let p = stats.n_features();
    if unit.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            actual: unit.len(),
        });
    }
    if let Some(j) = stats.stds.iter().position(|s| !(*s > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "feature {:?} has zero standard deviation",
            stats.names[j]
        )));
    }
    if unit.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("unit".into()));
    }
    if config.n_samples < p + 2 {
        return Err(Error::InvalidArgument(format!("n_samples must be at least p + 2 = {}", p + 2)));
    }
    let width = config.resolved_kernel_width(p);
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidArgument(format!("kernel width must be positive, got {width}")));
    }

    let n = config.n_samples;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut samples = Vec::with_capacity(n * p);
    let mut design = Vec::with_capacity(n * p);
    let mut weights = Vec::with_capacity(n);
    let kernel = |d2: f64| (-d2 / (width * width)).exp();

    match config.perturbation {
        Perturbation::Continuous => {
            let unit_design: Vec<f64> = (0..p).map(|j| (unit[j] - stats.means[j]) / stats.stds[j]).collect();
            samples.extend_from_slice(unit);
            design.extend_from_slice(&unit_design);
            weights.push(1.0);
            for _ in 1..n {
                let mut d2 = 0.0;
                for j in 0..p {
                    let e: f64 = rng.sample(StandardNormal);
                    let x = unit[j] + stats.stds[j] * e;
                    samples.push(x);
                    design.push((x - stats.means[j]) / stats.stds[j]);
                    d2 += e * e;
                }
                weights.push(kernel(d2));
            }
            Ok(Neighborhood {
                samples,
                design,
                unit_design,
                weights,
                kernel_width: width,
            })
        }
        Perturbation::QuartileBins => {
            let bins = stats
                .bins
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("quartile mode needs training bins".into()))?;
            let unit_bins: Vec<usize> = (0..p).map(|j| bins[j].bin_of(unit[j])).collect();
            let choosers: Vec<WeightedIndex<usize>> = bins
                .iter()
                .map(|b| WeightedIndex::new(b.counts).map_err(|e| Error::InvalidArgument(e.to_string())))
                .collect::<Result<_>>()?;
            samples.extend_from_slice(unit);
            design.extend(std::iter::repeat_n(1.0, p));
            weights.push(1.0);
            for _ in 1..n {
                let mut mismatches = 0.0;
                for j in 0..p {
                    let b = choosers[j].sample(&mut rng);
                    let q = &bins[j];
                    let e: f64 = rng.sample(StandardNormal);
                    samples.push((q.means[b] + q.stds[b] * e).clamp(q.lows[b], q.highs[b]));
                    let same = b == unit_bins[j];
                    design.push(if same { 1.0 } else { 0.0 });
                    if !same {
                        mismatches += 1.0;
                    }
                }
                weights.push(kernel(mismatches));
            }
            Ok(Neighborhood {
                samples,
                design,
                unit_design: vec![1.0; p],
                weights,
                kernel_width: width,
            })
        }
    }
}
