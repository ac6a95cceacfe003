//! Gradient boosted regression trees for binary default prediction.
//!
//! The ensemble models the log-odds `F(x) = F₀ + Σₖ νₖ·Tₖ(x)`, where `F₀` is
//! the log-odds of the training bad rate and each `Tₖ` is a shallow tree fit
//! to the negative gradient of the binomial deviance, `y − sigmoid(F)`, with
//! Newton leaf values `Σr / Σp(1−p)`. The tree weight `νₖ` is the constant
//! learning rate.

mod tree;

pub use tree::{fit_tree, PreorderNode, TreeNode, TreeParams};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dataset::Dataset;
use crate::{logit, parallel, sigmoid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbmConfig {
    pub n_trees: usize,
    /// 1 grows stumps.
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_samples_leaf: usize,
    pub subsample_fraction: f64,
    pub seed: u64,
}

impl Default for GbmConfig {
    fn default() -> Self {
        Self {
            n_trees: 300,
            max_depth: 3,
            learning_rate: 0.1,
            min_samples_leaf: 20,
            subsample_fraction: 1.0,
            seed: 0,
        }
    }
}

impl GbmConfig {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.max_depth == 0 {
            return bad("max_depth must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad("learning_rate must lie in (0,1]");
        }
        if self.min_samples_leaf == 0 {
            return bad("min_samples_leaf must be at least 1");
        }
        if !(self.subsample_fraction > 0.0 && self.subsample_fraction <= 1.0) {
            return bad("subsample_fraction must lie in (0,1]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedEnsemble {
    pub feature_names: Vec<String>,
    /// Log-odds of the training bad rate.
    pub initial_score: f64,
    #[serde(serialize_with = "trees_to_preorder", deserialize_with = "trees_from_preorder")]
    pub trees: Vec<TreeNode>,
    pub tree_weights: Vec<f64>,
    pub config: GbmConfig,
    /// Mean training deviance after 0, 1, …, n_trees trees.
    pub train_deviance: Vec<f64>,
}

fn trees_to_preorder<S: Serializer>(trees: &[TreeNode], s: S) -> Result<S::Ok, S::Error> {
    let encoded: Vec<Vec<PreorderNode>> = trees.iter().map(TreeNode::to_preorder).collect();
    encoded.serialize(s)
}

fn trees_from_preorder<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<TreeNode>, D::Error> {
    let encoded = Vec::<Vec<PreorderNode>>::deserialize(d)?;
    encoded
        .iter()
        .map(|pre| TreeNode::from_preorder(pre).ok_or_else(|| serde::de::Error::custom("malformed preorder tree")))
        .collect()
}

/// Mean binomial deviance of raw log-odds scores.
pub fn mean_deviance(raw: &[f64], target: &[u8]) -> f64 {
    let softplus = |z: f64| z.max(0.0) + (-z.abs()).exp().ln_1p();
    let total: f64 = raw
        .iter()
        .zip(target)
        .map(|(&f, &y)| if y == 1 { softplus(-f) } else { softplus(f) })
        .sum();
    2.0 * total / raw.len() as f64
}

/// Fits a boosted ensemble by sequential Newton-leaf gradient boosting.
pub fn fit_gbm(train: &Dataset, config: &GbmConfig) -> Result<BoostedEnsemble> {
    config.validate()?;
    train.require_both_classes()?;
    let n = train.n_rows();
    if n < 2 * config.min_samples_leaf {
        return Err(Error::InvalidArgument(format!(
            "{n} rows cannot hold two leaves of min_samples_leaf = {}",
            config.min_samples_leaf
        )));
    }

    let initial_score = logit(train.bad_rate());
    let mut raw = vec![initial_score; n];
    let mut trees = Vec::with_capacity(config.n_trees);
    let mut train_deviance = Vec::with_capacity(config.n_trees + 1);
    train_deviance.push(mean_deviance(&raw, train.target()));

    let sorted = tree::SortedColumns::new(train);
    let params = TreeParams {
        max_depth: config.max_depth,
        min_samples_leaf: config.min_samples_leaf,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n_sub = ((config.subsample_fraction * n as f64).round() as usize).clamp(1, n);
    let mut included = vec![true; n];
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];

    for _ in 0..config.n_trees {
        for i in 0..n {
            let p = sigmoid(raw[i]);
            grad[i] = train.target()[i] as f64 - p;
            hess[i] = p * (1.0 - p);
        }
        if n_sub < n {
            included.fill(false);
            for i in sample(&mut rng, n, n_sub) {
                included[i] = true;
            }
        }
        let tree = tree::fit_tree_presorted(train, &sorted, &included, &grad, &hess, &params);
        let lr = config.learning_rate;
        parallel::for_each_mut(&mut raw, |i, f| *f += lr * tree.leaf_value(train.row(i)));
        train_deviance.push(mean_deviance(&raw, train.target()));
        trees.push(tree);
    }

    Ok(BoostedEnsemble {
        feature_names: train.feature_names().to_vec(),
        initial_score,
        tree_weights: vec![config.learning_rate; trees.len()],
        trees,
        config: *config,
        train_deviance,
    })
}

impl BoostedEnsemble {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    fn raw_unchecked(&self, x: &[f64], n_trees: usize) -> f64 {
        let mut f = self.initial_score;
        for (t, w) in self.trees.iter().zip(&self.tree_weights).take(n_trees) {
            f += w * t.leaf_value(x);
        }
        f
    }

    /// Log-odds score `F₀ + Σ wₖ·Tₖ(x)`.
    pub fn predict_raw(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.raw_unchecked(x, self.trees.len()))
    }

    /// Log-odds using only the first `n_trees` trees.
    pub fn predict_raw_truncated(&self, x: &[f64], n_trees: usize) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.raw_unchecked(x, n_trees))
    }

    pub fn predict_pd(&self, x: &[f64]) -> Result<f64> {
        self.predict_raw(x).map(sigmoid)
    }

    /// Raw scores for every row of a dataset.
    pub fn predict_raw_batch(&self, data: &Dataset) -> Result<Vec<f64>> {
        if data.n_features() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                actual: data.n_features(),
            });
        }
        Ok(parallel::map_rows(data.features(), data.n_features(), |x| {
            self.raw_unchecked(x, self.trees.len())
        }))
    }

    /// Mean deviance of the ensemble truncated after 0, 1, …, n_trees trees.
    pub fn staged_deviance(&self, data: &Dataset) -> Result<Vec<f64>> {
        if data.n_features() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                actual: data.n_features(),
            });
        }
        let mut raw = vec![self.initial_score; data.n_rows()];
        let mut out = Vec::with_capacity(self.trees.len() + 1);
        out.push(mean_deviance(&raw, data.target()));
        for (t, &w) in self.trees.iter().zip(&self.tree_weights) {
            parallel::for_each_mut(&mut raw, |i, f| *f += w * t.leaf_value(data.row(i)));
            out.push(mean_deviance(&raw, data.target()));
        }
        Ok(out)
    }
}
