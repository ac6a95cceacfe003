//! Synthetic credit portfolios with a known probability-of-default surface.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::{sigmoid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    Linear,
    Nonlinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_rows: usize,
    pub n_features: usize,
    pub bad_rate_target: f64,
    pub nonlinearity: Nonlinearity,
    /// Common pairwise correlation of the Gaussian features.
    pub correlation: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n_rows == 0 {
            return bad("n_rows must be positive".into());
        }
        if self.n_features == 0 {
            return bad("n_features must be positive".into());
        }
        if !(self.bad_rate_target > 0.0 && self.bad_rate_target < 1.0) {
            return bad(format!("bad_rate_target must lie in (0,1), got {}", self.bad_rate_target));
        }
        if !(0.0..1.0).contains(&self.correlation) {
            return bad(format!("correlation must lie in [0,1), got {}", self.correlation));
        }
        if self.nonlinearity == Nonlinearity::Nonlinear && self.n_features < 3 {
            return bad("nonlinear ground truth needs at least 3 features".into());
        }
        Ok(())
    }
}

/// Standard deviation of the linear part of the log-odds.
const LINEAR_SCALE: f64 = 1.0;
/// Linear weights fall off as `exp(-DECAY · j / p)` with alternating sign.
const DECAY: f64 = 1.0;
/// Coefficient on `x0 · x1`, in units of the leading linear weight.
const INTERACTION: f64 = 3.6;
/// Coefficient on `1[x2 > STEP_AT]`, in units of the leading linear weight.
const STEP: f64 = 4.5;
const STEP_AT: f64 = 1.0;
/// Largest allowed |realized − target| bad rate.
const CALIBRATION_TOLERANCE: f64 = 0.005;
const MAX_DRAWS: usize = 100;

/// The generating log-odds surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub nonlinearity: Nonlinearity,
    /// Coefficient on `x0 · x1` (0 when linear).
    pub interaction: f64,
    /// Jump in log-odds where `x2` crosses the step (0 when linear).
    pub step: f64,
}

impl GroundTruth {
    fn new(n_features: usize, correlation: f64, nonlinearity: Nonlinearity) -> Self {
        let raw: Vec<f64> = (0..n_features)
            .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 } * (-DECAY * j as f64 / n_features as f64).exp())
            .collect();
        let sum: f64 = raw.iter().sum();
        let sum_sq: f64 = raw.iter().map(|w| w * w).sum();
        let var = (1.0 - correlation) * sum_sq + correlation * sum * sum;
        let scale = LINEAR_SCALE / var.sqrt();
        let (interaction, step) = match nonlinearity {
            Nonlinearity::Linear => (0.0, 0.0),
            Nonlinearity::Nonlinear => (INTERACTION * scale, STEP * scale),
        };
        Self {
            intercept: 0.0,
            coefficients: raw.into_iter().map(|w| w * scale).collect(),
            nonlinearity,
            interaction,
            step,
        }
    }

    /// Log-odds without the intercept.
    pub fn shape(&self, x: &[f64]) -> f64 {
        let mut eta: f64 = x.iter().zip(&self.coefficients).map(|(a, b)| a * b).sum();
        if self.nonlinearity == Nonlinearity::Nonlinear {
            eta += self.interaction * x[0] * x[1];
            if x[2] > STEP_AT {
                eta += self.step;
            }
        }
        eta
    }

    pub fn log_odds(&self, x: &[f64]) -> f64 {
        self.intercept + self.shape(x)
    }

    pub fn pd(&self, x: &[f64]) -> f64 {
        sigmoid(self.log_odds(x))
    }
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    generate_with_truth(spec).map(|(d, _)| d)
}

/// Draws features from an equicorrelated Gaussian, calibrates the intercept
/// by bisection so the expected bad rate over the drawn rows hits the target,
/// then draws Bernoulli defaults (redrawing up to a bounded number of times
/// until the realized rate is within half a percentage point).
pub fn generate_with_truth(spec: &SyntheticSpec) -> Result<(Dataset, GroundTruth)> {
    spec.validate()?;
    let (n, p) = (spec.n_rows, spec.n_features);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let shared = spec.correlation.sqrt();
    let own = (1.0 - spec.correlation).sqrt();
    let mut features = Vec::with_capacity(n * p);
    for _ in 0..n {
        let common: f64 = rng.sample(StandardNormal);
        for _ in 0..p {
            let e: f64 = rng.sample(StandardNormal);
            features.push(shared * common + own * e);
        }
    }

    let mut truth = GroundTruth::new(p, spec.correlation, spec.nonlinearity);
    let shapes: Vec<f64> = features.chunks(p).map(|x| truth.shape(x)).collect();
    truth.intercept = calibrate_intercept(&shapes, spec.bad_rate_target)?;

    let probs: Vec<f64> = shapes.iter().map(|s| sigmoid(truth.intercept + s)).collect();
    let mut target = vec![0u8; n];
    for attempt in 0..MAX_DRAWS {
        for (y, &pd) in target.iter_mut().zip(&probs) {
            *y = u8::from(rng.random::<f64>() < pd);
        }
        let realized = target.iter().map(|&y| y as f64).sum::<f64>() / n as f64;
        if (realized - spec.bad_rate_target).abs() <= CALIBRATION_TOLERANCE {
            let names = (0..p).map(|j| format!("x{j}")).collect();
            return Ok((Dataset::from_rows(features, target, names)?, truth));
        }
        if attempt + 1 == MAX_DRAWS {
            return Err(Error::Calibration(format!(
                "realized bad rate {realized:.4} still off target {} after {MAX_DRAWS} draws",
                spec.bad_rate_target
            )));
        }
    }
    unreachable!()
}

fn calibrate_intercept(shapes: &[f64], target: f64) -> Result<f64> {
    let mean_pd = |b: f64| shapes.iter().map(|s| sigmoid(b + s)).sum::<f64>() / shapes.len() as f64;
    let (mut lo, mut hi) = (-50.0, 50.0);
    if !(mean_pd(lo) < target && mean_pd(hi) > target) {
        return Err(Error::Calibration(format!("target bad rate {target} not bracketed")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_pd(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, p: usize, nl: Nonlinearity, corr: f64) -> SyntheticSpec {
        SyntheticSpec {
            n_rows: n,
            n_features: p,
            bad_rate_target: 0.03,
            nonlinearity: nl,
            correlation: corr,
            seed: 5,
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let s = spec(2000, 5, Nonlinearity::Nonlinear, 0.3);
        let a = generate_with_truth(&s).unwrap();
        let b = generate_with_truth(&s).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic(&SyntheticSpec { seed: 6, ..s }).unwrap();
        assert_ne!(a.0, c);
    }

    #[test]
    fn hits_bad_rate() {
        let d = generate_synthetic(&spec(20_000, 8, Nonlinearity::Nonlinear, 0.0)).unwrap();
        assert!((d.bad_rate() - 0.03).abs() <= 0.005);
    }

    #[test]
    fn linear_part_has_unit_scale() {
        for corr in [0.0, 0.5, 0.9] {
            let t = GroundTruth::new(20, corr, Nonlinearity::Linear);
            let s: f64 = t.coefficients.iter().sum();
            let ss: f64 = t.coefficients.iter().map(|c| c * c).sum();
            assert!(((1.0 - corr) * ss + corr * s * s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let ok = spec(100, 3, Nonlinearity::Linear, 0.0);
        for s in [
            SyntheticSpec { n_rows: 0, ..ok },
            SyntheticSpec { n_features: 0, ..ok },
            SyntheticSpec { bad_rate_target: 1.0, ..ok },
            SyntheticSpec { correlation: 1.0, ..ok },
            SyntheticSpec { n_features: 2, nonlinearity: Nonlinearity::Nonlinear, ..ok },
        ] {
            assert!(matches!(generate_synthetic(&s), Err(Error::InvalidArgument(_))));
        }
    }

    #[test]
    fn tiny_population_cannot_calibrate() {
        let s = SyntheticSpec { n_rows: 7, ..spec(7, 3, Nonlinearity::Linear, 0.0) };
        assert!(matches!(generate_synthetic(&s), Err(Error::Calibration(_))));
    }
}
