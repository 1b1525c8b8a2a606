//! Greedy binary trees over pre-binned features. One grower serves both
//! Gini classification trees and the Newton regression trees of boosting;
//! the two differ only in the per-sample statistics and the node score.

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix::{argmax, check_labels, infer_n_classes, Matrix};
use crate::error::Result;
use crate::sampling::{rng, Rng};

/// Sorted distinct values and per-row bin codes, column by column.
#[derive(Debug, Clone)]
pub(crate) struct Binned {
    pub values: Vec<Vec<f64>>,
    pub codes: Vec<Vec<u32>>,
}

impl Binned {
    pub fn new(x: &Matrix) -> Self {
        let (values, codes) = (0..x.n_cols())
            .into_par_iter()
            .map(|j| {
                // + 0.0 folds -0.0 into 0.0
                let col: Vec<f64> = x.column(j).into_iter().map(|v| v + 0.0).collect();
                let mut vals = col.clone();
                vals.sort_by(f64::total_cmp);
                vals.dedup();
                let codes = col
                    .iter()
                    .map(|v| vals.binary_search_by(|p| p.total_cmp(v)).expect("present") as u32)
                    .collect();
                (vals, codes)
            })
            .unzip();
        Binned {
            values,
            codes,
        }
    }

    pub fn n_cols(&self) -> usize {
        self.values.len()
    }

    /// Cut strictly between two present values `a < b`.
    fn threshold(&self, j: usize, lo: u32, hi: u32) -> f64 {
        let (a, b) = (self.values[j][lo as usize], self.values[j][hi as usize]);
        let mid = a + (b - a) / 2.0;
        if mid < b {
            mid
        } else {
            a
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Leaf {
        value: Vec<f64>,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Rows with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf(&self, row: &[f64]) -> &[f64] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

/// What a tree optimizes: per-sample statistics of width `dim`, summed per
/// node, with a score to maximize over the children.
pub(crate) trait Criterion: Sync {
    fn dim(&self) -> usize;
    fn score(&self, s: &[f64]) -> f64;
    /// Whether a child with these sums may exist.
    fn admissible(&self, s: &[f64]) -> bool;
    /// Whether the node should stop regardless of depth.
    fn is_terminal(&self, s: &[f64]) -> bool;
    fn leaf_value(&self, s: &[f64]) -> Vec<f64>;
    /// Smallest gain worth a split at a node with sums `s`.
    fn min_gain(&self, s: &[f64]) -> f64;
}

/// Weighted Gini on class-count vectors. `score = Σc²/w − w`, so the gain
/// of a split is `w` times the Gini impurity decrease.
pub(crate) struct Gini {
    pub n_classes: usize,
    pub min_samples_leaf: f64,
}

impl Criterion for Gini {
    fn dim(&self) -> usize {
        self.n_classes
    }
    fn score(&self, s: &[f64]) -> f64 {
        let w: f64 = s.iter().sum();
        if w <= 0.0 {
            return 0.0;
        }
        s.iter().map(|c| c * c).sum::<f64>() / w - w
    }
    fn admissible(&self, s: &[f64]) -> bool {
        s.iter().sum::<f64>() >= self.min_samples_leaf
    }
    fn is_terminal(&self, s: &[f64]) -> bool {
        s.iter().filter(|&&c| c > 0.0).count() <= 1
            || s.iter().sum::<f64>() < 2.0 * self.min_samples_leaf
    }
    fn leaf_value(&self, s: &[f64]) -> Vec<f64> {
        let w: f64 = s.iter().sum();
        s.iter().map(|c| c / w).collect()
    }
    fn min_gain(&self, s: &[f64]) -> f64 {
        1e-12 * s.iter().sum::<f64>()
    }
}

pub(crate) struct Grower<'a, C: Criterion> {
    pub binned: &'a Binned,
    pub criterion: &'a C,
    /// Row-major `n_rows × dim`.
    pub stats: &'a [f64],
    pub max_depth: Option<usize>,
    /// Features sampled per node; `None` means all candidates.
    pub max_features: Option<usize>,
    pub candidates: &'a [usize],
}

struct Best {
    gain: f64,
    feature: usize,
    lo: u32,
    hi: u32,
}

impl<C: Criterion> Grower<'_, C> {
    fn sum(&self, idx: &[u32]) -> Vec<f64> {
        let d = self.criterion.dim();
        let mut s = vec![0.0; d];
        for &i in idx {
            let row = &self.stats[i as usize * d..(i as usize + 1) * d];
            for (a, b) in s.iter_mut().zip(row) {
                *a += b;
            }
        }
        s
    }

    /// Best cut of feature `j` at this node: `(gain, lo_bin, hi_bin)`.
    fn best_for_feature(&self, j: usize, idx: &[u32], total: &[f64]) -> Option<(f64, u32, u32)> {
        let d = self.criterion.dim();
        let codes = &self.binned.codes[j];
        let n_bins = self.binned.values[j].len();
        // (bin, sums) in ascending bin order, nonempty only
        let hist: Vec<(u32, Vec<f64>)> = if n_bins <= 4 * idx.len() + 16 {
            let mut dense = vec![0.0; n_bins * d];
            let mut seen = vec![false; n_bins];
            for &i in idx {
                let b = codes[i as usize] as usize;
                seen[b] = true;
                let row = &self.stats[i as usize * d..(i as usize + 1) * d];
                for (a, v) in dense[b * d..(b + 1) * d].iter_mut().zip(row) {
                    *a += v;
                }
            }
            (0..n_bins)
                .filter(|&b| seen[b])
                .map(|b| (b as u32, dense[b * d..(b + 1) * d].to_vec()))
                .collect()
        } else {
            let mut pairs: Vec<(u32, u32)> = idx.iter().map(|&i| (codes[i as usize], i)).collect();
            pairs.sort_unstable();
            let mut out: Vec<(u32, Vec<f64>)> = Vec::new();
            for (b, i) in pairs {
                if out.last().is_none_or(|(lb, _)| *lb != b) {
                    out.push((b, vec![0.0; d]));
                }
                let acc = &mut out.last_mut().expect("pushed").1;
                let row = &self.stats[i as usize * d..(i as usize + 1) * d];
                for (a, v) in acc.iter_mut().zip(row) {
                    *a += v;
                }
            }
            out
        };
        if hist.len() < 2 {
            return None;
        }
        let parent = self.criterion.score(total);
        let mut left = vec![0.0; d];
        let mut right = vec![0.0; d];
        let mut best: Option<(f64, u32, u32)> = None;
        for w in 0..hist.len() - 1 {
            for (l, v) in left.iter_mut().zip(&hist[w].1) {
                *l += v;
            }
            for k in 0..d {
                right[k] = total[k] - left[k];
            }
            if !self.criterion.admissible(&left) || !self.criterion.admissible(&right) {
                continue;
            }
            let gain = self.criterion.score(&left) + self.criterion.score(&right) - parent;
            if best.as_ref().is_none_or(|b| gain > b.0) {
                best = Some((gain, hist[w].0, hist[w + 1].0));
            }
        }
        best
    }

    fn find_split(&self, idx: &[u32], total: &[f64], rng: &mut Rng) -> Option<Best> {
        let mut feats: Vec<usize> = match self.max_features {
            Some(m) if m < self.candidates.len() => sample(rng, self.candidates.len(), m)
                .into_iter()
                .map(|i| self.candidates[i])
                .collect(),
            _ => self.candidates.to_vec(),
        };
        feats.sort_unstable();
        let eval = |&j: &usize| self.best_for_feature(j, idx, total).map(|(g, lo, hi)| (j, g, lo, hi));
        let found: Vec<_> = if idx.len() * feats.len() > 200_000 {
            feats.par_iter().map(eval).collect()
        } else {
            feats.iter().map(eval).collect()
        };
        let mut best: Option<Best> = None;
        for (feature, gain, lo, hi) in found.into_iter().flatten() {
            if best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(Best {
                    gain,
                    feature,
                    lo,
                    hi,
                });
            }
        }
        best.filter(|b| b.gain > self.criterion.min_gain(total))
    }

    /// Grows a tree on the rows in `idx`; `rng` drives per-node feature
    /// sampling only.
    pub fn grow(&self, idx: Vec<u32>, rng: &mut Rng) -> Tree {
        let mut nodes = vec![Node::Leaf { value: Vec::new() }];
        let mut stack = vec![(0usize, idx, 0usize)];
        while let Some((id, idx, depth)) = stack.pop() {
            let total = self.sum(&idx);
            let can_split = !self.criterion.is_terminal(&total)
                && self.max_depth.is_none_or(|m| depth < m);
            let split = if can_split {
                self.find_split(&idx, &total, rng)
            } else {
                None
            };
            match split {
                None => {
                    nodes[id] = Node::Leaf {
                        value: self.criterion.leaf_value(&total),
                    }
                }
                Some(b) => {
                    let codes = &self.binned.codes[b.feature];
                    let (l, r): (Vec<u32>, Vec<u32>) =
                        idx.iter().partition(|&&i| codes[i as usize] <= b.lo);
                    let left = nodes.len();
                    nodes.push(Node::Leaf { value: Vec::new() });
                    nodes.push(Node::Leaf { value: Vec::new() });
                    nodes[id] = Node::Split {
                        feature: b.feature,
                        threshold: self.binned.threshold(b.feature, b.lo, b.hi),
                        left,
                        right: left + 1,
                    };
                    // right first so the left subtree is grown first
                    stack.push((left + 1, r, depth + 1));
                    stack.push((left, l, depth + 1));
                }
            }
        }
        Tree { nodes }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaxFeatures {
    All,
    /// `floor(sqrt(n_features))`, at least 1.
    Sqrt,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, n_features: usize) -> usize {
        match self {
            MaxFeatures::All => n_features,
            MaxFeatures::Sqrt => ((n_features as f64).sqrt().floor() as usize).max(1),
            MaxFeatures::Count(m) => m.clamp(1, n_features.max(1)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeConfig {
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
    pub seed: u64,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: None,
            min_samples_leaf: 1,
            max_features: MaxFeatures::All,
            seed: 0,
        }
    }
}

impl TreeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_depth == Some(0) || self.min_samples_leaf == 0 {
            return Err(crate::Error::Config(
                "max_depth and min_samples_leaf must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub config: TreeConfig,
    pub n_classes: usize,
    pub feature_names: Vec<String>,
    pub tree: Tree,
}

/// Class-count statistics with per-row multiplicities.
pub(crate) fn class_stats(y: &[u8], n_classes: usize, multiplicity: Option<&[u32]>) -> Vec<f64> {
    let mut s = vec![0.0; y.len() * n_classes];
    for (i, &c) in y.iter().enumerate() {
        s[i * n_classes + c as usize] = multiplicity.map_or(1.0, |m| f64::from(m[i]));
    }
    s
}

pub(crate) fn grow_classifier(
    binned: &Binned,
    y: &[u8],
    n_classes: usize,
    cfg: &TreeConfig,
    multiplicity: Option<&[u32]>,
    rng: &mut Rng,
) -> Tree {
    let stats = class_stats(y, n_classes, multiplicity);
    let crit = Gini {
        n_classes,
        min_samples_leaf: cfg.min_samples_leaf as f64,
    };
    let candidates: Vec<usize> = (0..binned.n_cols()).collect();
    let grower = Grower {
        binned,
        criterion: &crit,
        stats: &stats,
        max_depth: cfg.max_depth,
        max_features: Some(cfg.max_features.resolve(binned.n_cols())),
        candidates: &candidates,
    };
    let idx: Vec<u32> = (0..y.len() as u32)
        .filter(|&i| multiplicity.is_none_or(|m| m[i as usize] > 0))
        .collect();
    grower.grow(idx, rng)
}

pub fn fit_decision_tree(x: &Matrix, y: &[u8], cfg: &TreeConfig) -> Result<TreeModel> {
    cfg.validate()?;
    let n_classes = infer_n_classes(y).max(2);
    check_labels(x, y, n_classes)?;
    let binned = Binned::new(x);
    let tree = grow_classifier(&binned, y, n_classes, cfg, None, &mut rng(cfg.seed));
    Ok(TreeModel {
        config: cfg.clone(),
        n_classes,
        feature_names: x.names().to_vec(),
        tree,
    })
}

impl TreeModel {
    pub fn predict_row(&self, row: &[f64]) -> u8 {
        argmax(self.tree.leaf(row)) as u8
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_node_is_leaf() {
        let x = Matrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let y = [1u8, 1, 1];
        let binned = Binned::new(&x);
        let t = grow_classifier(&binned, &y, 2, &TreeConfig::default(), None, &mut rng(0));
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.leaf(&[9.0]), &[0.0, 1.0]);
    }

    #[test]
    fn signed_zeros_share_a_bin() {
        let x = Matrix::from_rows(&[vec![-0.0], vec![0.0], vec![1.0]]).unwrap();
        let b = Binned::new(&x);
        assert_eq!(b.values[0], vec![0.0, 1.0]);
        assert_eq!(b.codes[0], vec![0, 0, 1]);
    }

    #[test]
    fn single_split_between_two_and_three() {
        let x = Matrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0], vec![4.0]]).unwrap();
        let m = fit_decision_tree(&x, &[0, 0, 1, 1], &TreeConfig::default()).unwrap();
        assert_eq!(m.tree.nodes.len(), 3);
        match &m.tree.nodes[0] {
            Node::Split { threshold, .. } => assert!(*threshold >= 2.0 && *threshold < 3.0),
            other => panic!("expected split, got {other:?}"),
        }
        for (i, c) in [0u8, 0, 1, 1].iter().enumerate() {
            assert_eq!(m.predict_row(x.row(i)), *c);
        }
    }

    #[test]
    fn min_leaf_blocks_small_children() {
        let x = Matrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0], vec![4.0]]).unwrap();
        let cfg = TreeConfig {
            min_samples_leaf: 3,
            ..TreeConfig::default()
        };
        let m = fit_decision_tree(&x, &[0, 0, 1, 1], &cfg).unwrap();
        assert_eq!(m.tree.nodes.len(), 1);
    }

    #[test]
    fn depth_limit() {
        let rows: Vec<Vec<f64>> = (0..16).map(|i| vec![f64::from(i)]).collect();
        let y: Vec<u8> = (0..16).map(|i| (i % 2) as u8).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let cfg = TreeConfig {
            max_depth: Some(2),
            ..TreeConfig::default()
        };
        assert!(fit_decision_tree(&x, &y, &cfg).unwrap().tree.depth() <= 2);
        assert!(TreeConfig {
            max_depth: Some(0),
            ..TreeConfig::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn sqrt_features() {
        assert_eq!(MaxFeatures::Sqrt.resolve(66), 8);
        assert_eq!(MaxFeatures::Sqrt.resolve(1), 1);
        assert_eq!(MaxFeatures::Count(100).resolve(5), 5);
    }
}
