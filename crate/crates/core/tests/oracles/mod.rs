//! Independent reference implementations shared by the integration tests
//! and the acceptance harness.
#![allow(dead_code)]

use crisk::dataset::Dataset;
use crisk::gbm::TreeNode;

/// Mann–Whitney AUC by direct pair enumeration, ties counted ½.
pub fn pairwise_auc(scores: &[f64], target: &[u8]) -> f64 {
    let mut num = 0.0;
    let mut pairs = 0.0;
    for (i, &yi) in target.iter().enumerate() {
        if yi != 1 {
            continue;
        }
        for (j, &yj) in target.iter().enumerate() {
            if yj != 0 {
                continue;
            }
            pairs += 1.0;
            if scores[i] > scores[j] {
                num += 1.0;
            } else if scores[i] == scores[j] {
                num += 0.5;
            }
        }
    }
    num / pairs
}

/// Central difference of `f` along coordinate `j`.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, beta: &[f64], j: usize) -> f64 {
    let h = 1e-5 * beta[j].abs().max(1.0);
    let mut up = beta.to_vec();
    let mut down = beta.to_vec();
    up[j] += h;
    down[j] -= h;
    (f(&up) - f(&down)) / (2.0 * h)
}

/// Recursive greedy builder: try every feature and every midpoint between
/// consecutive distinct values, keep the strictly best squared-error gain.
pub fn naive_tree(data: &Dataset, rows: &[usize], grad: &[f64], hess: &[f64], depth: usize, msl: usize) -> TreeNode {
    let leaf = || {
        let g: f64 = rows.iter().map(|&i| grad[i]).sum();
        let h: f64 = rows.iter().map(|&i| hess[i]).sum();
        TreeNode::Leaf { value: if h < 1e-150 { 0.0 } else { g / h } }
    };
    if depth == 0 || rows.len() < 2 * msl {
        return leaf();
    }
    let total: f64 = rows.iter().map(|&i| grad[i]).sum();
    let n = rows.len() as f64;
    let mut best: Option<(f64, usize, f64)> = None;
    for j in 0..data.n_features() {
        let mut values: Vec<f64> = rows.iter().map(|&i| data.value(i, j)).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let t = 0.5 * (w[0] + w[1]);
            let left: Vec<usize> = rows.iter().copied().filter(|&i| data.value(i, j) <= t).collect();
            let nl = left.len();
            if nl < msl || rows.len() - nl < msl {
                continue;
            }
            let sl: f64 = left.iter().map(|&i| grad[i]).sum();
            let sr = total - sl;
            let gain = sl * sl / nl as f64 + sr * sr / (n - nl as f64) - total * total / n;
            if best.is_none_or(|(g, _, _)| gain > g + 1e-12) {
                best = Some((gain, j, t));
            }
        }
    }
    match best {
        Some((gain, feature, threshold)) if gain > 1e-12 => {
            let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| data.value(i, feature) <= threshold);
            TreeNode::Split {
                feature,
                threshold,
                left: Box::new(naive_tree(data, &l, grad, hess, depth - 1, msl)),
                right: Box::new(naive_tree(data, &r, grad, hess, depth - 1, msl)),
            }
        }
        _ => leaf(),
    }
}

/// First structural or numeric difference between two trees, if any.
pub fn tree_difference(a: &TreeNode, b: &TreeNode) -> Option<String> {
    match (a, b) {
        (TreeNode::Leaf { value: x }, TreeNode::Leaf { value: y }) => {
            ((x - y).abs() >= 1e-9).then(|| format!("leaf {x} vs {y}"))
        }
        (
            TreeNode::Split { feature: f1, threshold: t1, left: l1, right: r1 },
            TreeNode::Split { feature: f2, threshold: t2, left: l2, right: r2 },
        ) => {
            if f1 != f2 || (t1 - t2).abs() >= 1e-12 {
                return Some(format!("split x{f1} <= {t1} vs x{f2} <= {t2}"));
            }
            tree_difference(l1, l2).or_else(|| tree_difference(r1, r2))
        }
        _ => Some("shape differs".into()),
    }
}
