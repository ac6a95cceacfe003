//! Depth-limited regression trees grown level by level on presorted columns.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::parallel;

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Split {
        feature: usize,
        /// Rows with `x[feature] <= threshold` go left.
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        value: f64,
    },
}

impl TreeNode {
    pub fn leaf_value(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if x[*feature] <= *threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    /// Features used by any split, in preorder (with repeats).
    pub fn split_features(&self) -> Vec<usize> {
        self.to_preorder()
            .into_iter()
            .filter_map(|n| match n {
                PreorderNode::Split { feature, .. } => Some(feature),
                PreorderNode::Leaf { .. } => None,
            })
            .collect()
    }

    pub fn to_preorder(&self) -> Vec<PreorderNode> {
        let mut out = Vec::new();
        fn walk(n: &TreeNode, out: &mut Vec<PreorderNode>) {
            match n {
                TreeNode::Leaf { value } => out.push(PreorderNode::Leaf { value: *value }),
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    out.push(PreorderNode::Split {
                        feature: *feature,
                        threshold: *threshold,
                    });
                    walk(left, out);
                    walk(right, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    /// Inverse of [`TreeNode::to_preorder`]; `None` on a malformed sequence.
    pub fn from_preorder(nodes: &[PreorderNode]) -> Option<TreeNode> {
        fn build(nodes: &[PreorderNode], pos: &mut usize) -> Option<TreeNode> {
            let node = nodes.get(*pos)?;
            *pos += 1;
            Some(match *node {
                PreorderNode::Leaf { value } => TreeNode::Leaf { value },
                PreorderNode::Split { feature, threshold } => {
                    let left = build(nodes, pos)?;
                    let right = build(nodes, pos)?;
                    TreeNode::Split {
                        feature,
                        threshold,
                        left: Box::new(left),
                        right: Box::new(right),
                    }
                }
            })
        }
        let mut pos = 0;
        let tree = build(nodes, &mut pos)?;
        (pos == nodes.len()).then_some(tree)
    }
}

/// One entry of the preorder tree encoding used in saved ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreorderNode {
    Split { feature: usize, threshold: f64 },
    Leaf { value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
}

/// Row indices of each column, ordered by value (ties by row index), with
/// the values in the same order.
pub(crate) struct SortedColumns {
    order: Vec<Vec<u32>>,
    values: Vec<Vec<f64>>,
}

impl SortedColumns {
    pub(crate) fn new(data: &Dataset) -> Self {
        let n = data.n_rows();
        let order = parallel::map_range(data.n_features(), |j| {
            let mut idx: Vec<u32> = (0..n as u32).collect();
            idx.sort_by(|&a, &b| {
                data.value(a as usize, j)
                    .total_cmp(&data.value(b as usize, j))
                    .then(a.cmp(&b))
            });
            idx
        });
        let values = parallel::map_range(data.n_features(), |j| {
            order[j].iter().map(|&i| data.value(i as usize, j)).collect()
        });
        Self { order, values }
    }
}

const EXCLUDED: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct NodeStats {
    count: usize,
    sum_grad: f64,
    sum_hess: f64,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    gain: f64,
    threshold: f64,
}

enum Building {
    Pending,
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf(f64),
}

/// Fits a tree to `grad` (the residuals) by greedy squared-error splitting
/// and sets each leaf to the Newton step `Σ grad / Σ hess`.
///
/// Equal gains resolve to the lowest feature index, then the lowest
/// threshold, so the result does not depend on thread scheduling.
pub fn fit_tree(data: &Dataset, grad: &[f64], hess: &[f64], params: &TreeParams) -> TreeNode {
    let sorted = SortedColumns::new(data);
    let included = vec![true; data.n_rows()];
    fit_tree_presorted(data, &sorted, &included, grad, hess, params)
}

pub(crate) fn fit_tree_presorted(
    data: &Dataset,
    sorted: &SortedColumns,
    included: &[bool],
    grad: &[f64],
    hess: &[f64],
    params: &TreeParams,
) -> TreeNode {
    let n = data.n_rows();
    let mut node_of: Vec<u32> = included.iter().map(|&inc| if inc { 0 } else { EXCLUDED }).collect();
    let mut nodes = vec![Building::Pending];
    let mut stats = vec![stats_of(
        (0..n).filter(|&i| included[i]),
        grad,
        hess,
    )];
    // nodes[id] for ids in `frontier` are Pending
    let mut frontier: Vec<usize> = vec![0];

    for _depth in 0..params.max_depth {
        let open: Vec<usize> = frontier
            .iter()
            .copied()
            .filter(|&id| stats[id].count >= 2 * params.min_samples_leaf.max(1))
            .collect();
        if open.is_empty() {
            break;
        }
        let mut slot_of = vec![usize::MAX; nodes.len()];
        for (s, &id) in open.iter().enumerate() {
            slot_of[id] = s;
        }

        let per_feature: Vec<Vec<Option<Candidate>>> = parallel::map_range(data.n_features(), |j| {
            scan_feature(&sorted.order[j], &sorted.values[j], &node_of, &slot_of, &open, &stats, grad, params)
        });

        let mut next = Vec::new();
        let mut split_any = false;
        let mut decisions: Vec<Option<(usize, f64)>> = vec![None; open.len()];
        for (s, decision) in decisions.iter_mut().enumerate() {
            let mut best: Option<(usize, Candidate)> = None;
            for (j, cands) in per_feature.iter().enumerate() {
                if let Some(c) = cands[s] {
                    if best.is_none_or(|(_, b)| c.gain > b.gain) {
                        best = Some((j, c));
                    }
                }
            }
            if let Some((j, c)) = best {
                if c.gain > 0.0 {
                    *decision = Some((j, c.threshold));
                }
            }
        }
        let mut children = vec![(0u32, 0u32); open.len()];
        for (s, &id) in open.iter().enumerate() {
            if let Some((feature, threshold)) = decisions[s] {
                let left = nodes.len();
                nodes.push(Building::Pending);
                nodes.push(Building::Pending);
                stats.push(NodeStats { count: 0, sum_grad: 0.0, sum_hess: 0.0 });
                stats.push(NodeStats { count: 0, sum_grad: 0.0, sum_hess: 0.0 });
                nodes[id] = Building::Split {
                    feature,
                    threshold,
                    left,
                    right: left + 1,
                };
                children[s] = (left as u32, left as u32 + 1);
                split_any = true;
            }
        }
        if !split_any {
            break;
        }
        slot_of.resize(nodes.len(), usize::MAX);
        for i in 0..n {
            let id = node_of[i];
            if id == EXCLUDED {
                continue;
            }
            let s = slot_of[id as usize];
            if s == usize::MAX {
                continue;
            }
            if let Some((feature, threshold)) = decisions[s] {
                let child = if data.value(i, feature) <= threshold {
                    children[s].0
                } else {
                    children[s].1
                };
                node_of[i] = child;
                let st = &mut stats[child as usize];
                st.count += 1;
                st.sum_grad += grad[i];
                st.sum_hess += hess[i];
            }
        }
        for (s, &id) in open.iter().enumerate() {
            if decisions[s].is_some() {
                if let Building::Split { left, right, .. } = nodes[id] {
                    next.push(left);
                    next.push(right);
                }
            }
        }
        // nodes left unsplit in `frontier` stay Pending and become leaves
        frontier = next;
    }

    for (id, node) in nodes.iter_mut().enumerate() {
        if let Building::Pending = node {
            *node = Building::Leaf(newton_leaf(&stats[id]));
        }
    }
    assemble(&nodes, 0)
}

fn newton_leaf(st: &NodeStats) -> f64 {
    if st.sum_hess < 1e-150 {
        0.0
    } else {
        st.sum_grad / st.sum_hess
    }
}

fn stats_of(rows: impl Iterator<Item = usize>, grad: &[f64], hess: &[f64]) -> NodeStats {
    let mut st = NodeStats { count: 0, sum_grad: 0.0, sum_hess: 0.0 };
    for i in rows {
        st.count += 1;
        st.sum_grad += grad[i];
        st.sum_hess += hess[i];
    }
    st
}

fn assemble(nodes: &[Building], id: usize) -> TreeNode {
    match nodes[id] {
        Building::Leaf(value) => TreeNode::Leaf { value },
        Building::Split {
            feature,
            threshold,
            left,
            right,
        } => TreeNode::Split {
            feature,
            threshold,
            left: Box::new(assemble(nodes, left)),
            right: Box::new(assemble(nodes, right)),
        },
        Building::Pending => unreachable!("pending nodes are converted to leaves"),
    }
}

/// Squared-error reduction of splitting a node with gradient sum `total` over
/// `n` rows into a left part with sum `left` over `n_left` rows.
#[inline]
pub(crate) fn split_gain(total: f64, n: usize, left: f64, n_left: usize) -> f64 {
    let right = total - left;
    let n_right = n - n_left;
    left * left / n_left as f64 + right * right / n_right as f64 - total * total / n as f64
}

#[allow(clippy::too_many_arguments)]
fn scan_feature(
    order: &[u32],
    values: &[f64],
    node_of: &[u32],
    slot_of: &[usize],
    open: &[usize],
    stats: &[NodeStats],
    grad: &[f64],
    params: &TreeParams,
) -> Vec<Option<Candidate>> {
    let k = open.len();
    let msl = params.min_samples_leaf.max(1);
    let mut count = vec![0usize; k];
    let mut sum = vec![0.0f64; k];
    let mut last = vec![f64::NAN; k];
    let mut best: Vec<Option<Candidate>> = vec![None; k];
    for (&row, &v) in order.iter().zip(values) {
        let row = row as usize;
        let id = node_of[row];
        if id == EXCLUDED {
            continue;
        }
        let s = slot_of[id as usize];
        if s == usize::MAX {
            continue;
        }
        let total = &stats[open[s]];
        if count[s] >= msl && total.count - count[s] >= msl && v > last[s] {
            let gain = split_gain(total.sum_grad, total.count, sum[s], count[s]);
            if best[s].is_none_or(|b| gain > b.gain) {
                let mut threshold = 0.5 * (last[s] + v);
                if threshold >= v {
                    threshold = last[s];
                }
                best[s] = Some(Candidate { gain, threshold });
            }
        }
        count[s] += 1;
        sum[s] += grad[row];
        last[s] = v;
    }
    best
}
