use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    /// Largest allowed |bad_rate(train) − bad_rate(test)|.
    pub balance_check_tolerance: f64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.70,
            seed: 0,
            balance_check_tolerance: 0.005,
        }
    }
}

/// Stratified random train/test split.
///
/// The train side receives `round(f·n)` rows of which `round(f·n_bad)` are
/// defaults; each class is shuffled independently with a seeded generator.
/// Both sides keep the original row order.
pub fn split(data: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train_fraction must lie in (0,1), got {}",
            spec.train_fraction
        )));
    }
    data.require_both_classes()?;

    let n = data.n_rows();
    let (mut bad, mut good): (Vec<usize>, Vec<usize>) =
        (0..n).partition(|&i| data.target()[i] == 1);
    let n_train = (spec.train_fraction * n as f64).round() as usize;
    let n_train_bad = ((spec.train_fraction * bad.len() as f64).round() as usize).min(n_train);
    let n_train_good = (n_train - n_train_bad).min(good.len());

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    bad.shuffle(&mut rng);
    good.shuffle(&mut rng);

    let mut train: Vec<usize> = bad[..n_train_bad]
        .iter()
        .chain(&good[..n_train_good])
        .copied()
        .collect();
    let mut test: Vec<usize> = bad[n_train_bad..]
        .iter()
        .chain(&good[n_train_good..])
        .copied()
        .collect();
    train.sort_unstable();
    test.sort_unstable();

    if train.is_empty() || test.is_empty() {
        return Err(Error::UnbalancedSplit {
            difference: f64::INFINITY,
            tolerance: spec.balance_check_tolerance,
        });
    }
    let rate = |rows: &[usize]| {
        rows.iter().filter(|&&i| data.target()[i] == 1).count() as f64 / rows.len() as f64
    };
    let difference = (rate(&train) - rate(&test)).abs();
    if difference > spec.balance_check_tolerance {
        return Err(Error::UnbalancedSplit {
            difference,
            tolerance: spec.balance_check_tolerance,
        });
    }
    Ok((data.subset(&train), data.subset(&test)))
}
