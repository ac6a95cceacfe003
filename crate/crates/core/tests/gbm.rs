mod oracles;

use crisk::dataset::{generate_synthetic, split, Dataset, Nonlinearity, SplitSpec, SyntheticSpec};
use crisk::gbm::{fit_gbm, fit_tree, mean_deviance, GbmConfig, PreorderNode, TreeNode, TreeParams};
use crisk::sigmoid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use oracles::{naive_tree, tree_difference};

fn random_data(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Dataset {
    let x: Vec<f64> = (0..n * p).map(|_| (rng.random_range(-2.0..2.0) * 8.0f64).round() / 8.0).collect();
    let y: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
    Dataset::from_rows(x, y, (0..p).map(|j| format!("x{j}")).collect()).unwrap()
}

#[test]
fn tree_matches_exhaustive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..25 {
        let n = rng.random_range(10..200);
        let p = rng.random_range(1..5);
        // a coarse grid of values gives plenty of ties in x
        let data = random_data(&mut rng, n, p);
        let grad: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let hess: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..0.25)).collect();
        let params = TreeParams { max_depth: rng.random_range(1..4), min_samples_leaf: rng.random_range(1..8) };
        let fast = fit_tree(&data, &grad, &hess, &params);
        let rows: Vec<usize> = (0..n).collect();
        let slow = naive_tree(&data, &rows, &grad, &hess, params.max_depth, params.min_samples_leaf);
        if let Some(diff) = tree_difference(&fast, &slow) {
            panic!("{diff}\n{fast:?}\n{slow:?}");
        }
    }
}

fn credit_data(n: usize, seed: u64) -> Dataset {
    generate_synthetic(&SyntheticSpec {
        n_rows: n,
        n_features: 6,
        bad_rate_target: 0.1,
        nonlinearity: Nonlinearity::Nonlinear,
        correlation: 0.2,
        seed,
    })
    .unwrap()
}

#[test]
fn training_deviance_never_increases() {
    let data = credit_data(5_000, 3);
    let m = fit_gbm(&data, &GbmConfig::default()).unwrap();
    assert_eq!(m.train_deviance.len(), 301);
    for (k, w) in m.train_deviance.windows(2).enumerate() {
        assert!(w[1] <= w[0] + 1e-12, "deviance rose at tree {}: {} -> {}", k + 1, w[0], w[1]);
    }
    assert!(m.train_deviance[300] < m.train_deviance[0]);
}

#[test]
fn stumps_are_additive_in_features() {
    let data = credit_data(3_000, 4);
    let m = fit_gbm(&data, &GbmConfig { max_depth: 1, n_trees: 80, ..Default::default() }).unwrap();
    assert!(m.trees.iter().all(|t| t.depth() <= 1));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let a: Vec<f64> = (0..6).map(|_| rng.random_range(-2.0..2.0)).collect();
        let b: Vec<f64> = (0..6).map(|_| rng.random_range(-2.0..2.0)).collect();
        // swap the first two coordinates between a and b
        let mut ab = a.clone();
        ab[..2].copy_from_slice(&b[..2]);
        let mut ba = b.clone();
        ba[..2].copy_from_slice(&a[..2]);
        let f = |x: &[f64]| m.predict_raw(x).unwrap();
        assert!((f(&a) + f(&b) - f(&ab) - f(&ba)).abs() < 1e-9);
    }
}

fn walk_preorder(nodes: &[PreorderNode], x: &[f64]) -> f64 {
    fn go(nodes: &[PreorderNode], pos: &mut usize, x: &[f64], active: bool) -> f64 {
        let here = *pos;
        *pos += 1;
        match nodes[here] {
            PreorderNode::Leaf { value } => if active { value } else { 0.0 },
            PreorderNode::Split { feature, threshold } => {
                let left = active && x[feature] <= threshold;
                let right = active && !left;
                go(nodes, pos, x, left) + go(nodes, pos, x, right)
            }
        }
    }
    go(nodes, &mut 0, x, true)
}

#[test]
fn serialized_trees_give_the_same_scores() {
    let data = credit_data(2_000, 5);
    let m = fit_gbm(&data, &GbmConfig { n_trees: 40, ..Default::default() }).unwrap();
    let json: serde_json::Value = serde_json::to_value(&m).unwrap();
    let trees: Vec<Vec<PreorderNode>> = serde_json::from_value(json["trees"].clone()).unwrap();
    let weights: Vec<f64> = serde_json::from_value(json["tree_weights"].clone()).unwrap();
    let f0 = json["initial_score"].as_f64().unwrap();
    for x in data.rows().take(300) {
        let independent = f0 + trees.iter().zip(&weights).map(|(t, w)| w * walk_preorder(t, x)).sum::<f64>();
        assert!((m.predict_raw(x).unwrap() - independent).abs() < 1e-12);
    }
}

#[test]
fn zero_trees_is_the_base_rate() {
    let data = credit_data(1_000, 6);
    let m = fit_gbm(&data, &GbmConfig { n_trees: 0, ..Default::default() }).unwrap();
    for x in data.rows().take(20) {
        assert!((m.predict_pd(x).unwrap() - data.bad_rate()).abs() < 1e-12);
    }
}

#[test]
fn leaves_hold_at_least_min_samples() {
    let data = credit_data(2_000, 7);
    for msl in [1, 20, 150] {
        let m = fit_gbm(&data, &GbmConfig { n_trees: 20, max_depth: 4, min_samples_leaf: msl, ..Default::default() }).unwrap();
        for tree in &m.trees {
            let mut counts = std::collections::HashMap::<u64, usize>::new();
            for x in data.rows() {
                // leaf values are distinct enough to identify leaves
                *counts.entry(leaf_path(tree, x)).or_default() += 1;
            }
            assert!(counts.values().all(|&c| c >= msl), "msl {msl}: {counts:?}");
        }
    }
}

fn leaf_path(tree: &TreeNode, x: &[f64]) -> u64 {
    let mut node = tree;
    let mut path = 1u64;
    while let TreeNode::Split { feature, threshold, left, right } = node {
        let go_left = x[*feature] <= *threshold;
        path = path * 2 + u64::from(!go_left);
        node = if go_left { left } else { right };
    }
    path
}

#[test]
fn holdout_deviance_eventually_rises() {
    let data = credit_data(1_500, 8);
    let (train, test) = split(&data, &SplitSpec { seed: 1, balance_check_tolerance: 0.02, ..Default::default() }).unwrap();
    let m = fit_gbm(
        &train,
        &GbmConfig { n_trees: 400, max_depth: 5, learning_rate: 0.3, min_samples_leaf: 2, ..Default::default() },
    )
    .unwrap();
    let staged = m.staged_deviance(&test).unwrap();
    let (best, _) = staged
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    assert!(best < 400, "holdout optimum at the last tree");
    assert!(staged[400] > staged[best]);
    assert!(m.train_deviance[400] < m.train_deviance[best]);
}

#[test]
fn deviance_formula() {
    let raw = [0.3, -1.2, 2.0];
    let y = [1u8, 0, 0];
    let by_hand: f64 = raw
        .iter()
        .zip(&y)
        .map(|(&f, &t)| {
            let p = sigmoid(f);
            -2.0 * if t == 1 { p.ln() } else { (1.0 - p).ln() }
        })
        .sum::<f64>()
        / 3.0;
    assert!((mean_deviance(&raw, &y) - by_hand).abs() < 1e-14);
}
