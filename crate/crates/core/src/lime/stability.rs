use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::explain::{explain, Explanation};
use super::{Blackbox, FeatureStats, LimeConfig};
use crate::{parallel, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedPolicy {
    /// Run `r` uses `seed + r`.
    Increment,
    /// Every run reuses `seed`.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub unit_id: String,
    pub runs: usize,
    /// Mean pairwise Jaccard overlap of the displayed top-k feature sets.
    pub topk_overlap: f64,
    /// Per-feature sample standard deviation of contributions across runs.
    pub coefficient_dispersion: Vec<f64>,
    pub mean_r_squared: f64,
    /// Mean over runs of the largest |contribution|.
    pub mean_abs_top_contribution: f64,
    pub stable: bool,
}

impl StabilityReport {
    pub fn mean_dispersion(&self) -> f64 {
        let d = &self.coefficient_dispersion;
        d.iter().sum::<f64>() / d.len() as f64
    }
}

pub fn jaccard(a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// Repeats [`explain`] on one unit and measures how much the answer moves.
pub fn stability<B: Blackbox + ?Sized>(
    blackbox: &B,
    unit_id: &str,
    unit: &[f64],
    stats: &FeatureStats,
    config: &LimeConfig,
    runs: usize,
    policy: SeedPolicy,
) -> Result<StabilityReport> {
    if runs < 2 {
        return Err(Error::InvalidArgument("stability needs at least 2 runs".into()));
    }
    let explanations: Vec<Explanation> = parallel::map_range(runs, |r| {
        let seed = match policy {
            SeedPolicy::Increment => config.seed.wrapping_add(r as u64),
            SeedPolicy::Fixed => config.seed,
        };
        explain(blackbox, unit_id, unit, stats, &LimeConfig { seed, ..*config })
    })
    .into_iter()
    .collect::<Result<_>>()?;
    Ok(summarize_runs(unit_id, &explanations, stats.n_features(), config.stable_overlap))
}

pub(crate) fn summarize_runs(unit_id: &str, runs: &[Explanation], p: usize, threshold: f64) -> StabilityReport {
    let sets: Vec<BTreeSet<usize>> = runs.iter().map(|e| e.top_features().into_iter().collect()).collect();
    let mut total = 0.0;
    let mut pairs = 0usize;
    for a in 0..sets.len() {
        for b in a + 1..sets.len() {
            total += jaccard(&sets[a], &sets[b]);
            pairs += 1;
        }
    }
    let topk_overlap = total / pairs as f64;

    let k = runs.len() as f64;
    let coefficient_dispersion = (0..p)
        .map(|j| {
            let (mut mean, mut m2) = (0.0, 0.0);
            for (r, e) in runs.iter().enumerate() {
                let v = e.contribution_of(j);
                let delta = v - mean;
                mean += delta / (r + 1) as f64;
                m2 += delta * (v - mean);
            }
            (m2 / (k - 1.0)).sqrt()
        })
        .collect();
    StabilityReport {
        unit_id: unit_id.to_string(),
        runs: runs.len(),
        topk_overlap,
        coefficient_dispersion,
        mean_r_squared: runs.iter().map(|e| e.surrogate_r_squared).sum::<f64>() / k,
        mean_abs_top_contribution: runs
            .iter()
            .map(|e| e.all_contributions.first().map_or(0.0, |c| c.value.abs()))
            .sum::<f64>()
            / k,
        stable: topk_overlap >= threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jaccard_cases() {
        let s = |v: &[usize]| v.iter().copied().collect::<BTreeSet<_>>();
        assert_eq!(jaccard(&s(&[1, 2, 3]), &s(&[1, 2, 3])), 1.0);
        assert_eq!(jaccard(&s(&[1, 2]), &s(&[3, 4])), 0.0);
        assert_eq!(jaccard(&s(&[1, 2, 3]), &s(&[2, 3, 4])), 0.5);
        assert_eq!(jaccard(&s(&[]), &s(&[])), 1.0);
    }

    #[test]
    fn fixed_seed_is_perfectly_stable() {
        let stats = FeatureStats::standard(6);
        let cfg = LimeConfig { n_samples: 300, n_features_shown: 3, ..Default::default() };
        let f = |x: &[f64]| (x[0] * x[1]).tanh() + 0.3 * x[4];
        let r = stability(&f, "u", &[0.2; 6], &stats, &cfg, 3, SeedPolicy::Fixed).unwrap();
        assert_eq!(r.topk_overlap, 1.0);
        assert!(r.coefficient_dispersion.iter().all(|&d| d == 0.0));
        assert!(r.stable);
    }

    #[test]
    fn needs_two_runs() {
        let stats = FeatureStats::standard(1);
        let f = |x: &[f64]| x[0];
        assert!(stability(&f, "u", &[0.0], &stats, &LimeConfig::default(), 1, SeedPolicy::Increment).is_err());
    }
}
