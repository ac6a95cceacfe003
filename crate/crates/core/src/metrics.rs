//! Discrimination metrics for PD scores.
//!
//! Conventions:
//! * higher score = riskier;
//! * Lorenz (cumulative accuracy) curve: x is the cumulative share of the
//!   population taken worst-score-first, y the cumulative share of defaults;
//! * AUC is the Mann–Whitney statistic with tied pairs counted ½;
//! * Gini is the accuracy ratio `2·AUC − 1`, not the inequality Gini.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// `(population share, bad share)` at each distinct-score boundary.
    pub lorenz_points: Vec<(f64, f64)>,
    pub gini: f64,
    pub auc: f64,
    pub n_good: usize,
    pub n_bad: usize,
}

/// Builds the Lorenz curve, AUC and Gini for risk scores against defaults.
pub fn evaluate(scores: &[f64], target: &[u8]) -> Result<EvalReport> {
    if scores.len() != target.len() {
        return Err(Error::DimensionMismatch {
            expected: target.len(),
            actual: scores.len(),
        });
    }
    if let Some(i) = scores.iter().position(|s| s.is_nan()) {
        return Err(Error::NonFinite(format!("score at index {i} is NaN")));
    }
    if let Some(i) = target.iter().position(|&y| y > 1) {
        return Err(Error::NonBinaryTarget {
            row: i,
            value: target[i].to_string(),
        });
    }
    let n = scores.len();
    let n_bad = target.iter().filter(|&&y| y == 1).count();
    let n_good = n - n_bad;
    if n_bad == 0 {
        return Err(Error::SingleClass(0));
    }
    if n_good == 0 {
        return Err(Error::SingleClass(1));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    // Twice the concordance count: 2·(bad ranked above good) + (tied bad/good).
    let mut twice_concordant: u128 = 0;
    let mut bads_above: u128 = 0;
    let mut seen = 0usize;
    let mut lorenz_points = vec![(0.0, 0.0)];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let group_bad = order[start..end].iter().filter(|&&i| target[i] == 1).count() as u128;
        let group_good = (end - start) as u128 - group_bad;
        twice_concordant += group_good * (2 * bads_above + group_bad);
        bads_above += group_bad;
        seen = end;
        lorenz_points.push((seen as f64 / n as f64, bads_above as f64 / n_bad as f64));
        start = end;
    }
    debug_assert_eq!(seen, n);

    let auc = twice_concordant as f64 / (2 * n_good as u128 * n_bad as u128) as f64;
    Ok(EvalReport {
        lorenz_points,
        gini: 2.0 * auc - 1.0,
        auc,
        n_good,
        n_bad,
    })
}

/// Difference of Gini indices, in points (×100).
pub fn gini_delta(report_a: &EvalReport, report_b: &EvalReport) -> f64 {
    (report_a.gini - report_b.gini) * 100.0
}

/// Weighted `1 − Σw(o−p)² / Σw(o−ō)²`.
pub fn r_squared(predicted: &[f64], observed: &[f64], weights: &[f64]) -> Result<f64> {
    if predicted.len() != observed.len() || weights.len() != observed.len() {
        return Err(Error::DimensionMismatch {
            expected: observed.len(),
            actual: predicted.len().min(weights.len()),
        });
    }
    let w_sum: f64 = weights.iter().sum();
    if !(w_sum > 0.0) || weights.iter().any(|&w| w < 0.0) {
        return Err(Error::InvalidArgument("weights must be nonnegative with positive sum".into()));
    }
    let mean = observed.iter().zip(weights).map(|(o, w)| o * w).sum::<f64>() / w_sum;
    let ss_tot: f64 = observed.iter().zip(weights).map(|(o, w)| w * (o - mean).powi(2)).sum();
    if ss_tot <= (4.0 * f64::EPSILON * mean.abs().max(1.0)).powi(2) * w_sum {
        return Err(Error::InvalidArgument("observed values are weighted-constant".into()));
    }
    let ss_res: f64 = predicted
        .iter()
        .zip(observed)
        .zip(weights)
        .map(|((p, o), w)| w * (o - p).powi(2))
        .sum();
    Ok(1.0 - ss_res / ss_tot)
}
