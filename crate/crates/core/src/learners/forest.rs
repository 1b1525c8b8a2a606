//! Bagged CART ensembles with per-node feature sampling.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix::{check_labels, infer_n_classes, Matrix};
use super::tree::{grow_classifier, Binned, MaxFeatures, Tree, TreeConfig};
use crate::error::{Error, Result};
use crate::sampling::{derive_seed, rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_estimators: usize,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_estimators: 100,
            max_depth: None,
            min_samples_leaf: 1,
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_estimators == 0 {
            return Err(Error::Config("n_estimators must be at least 1".into()));
        }
        self.tree_config(self.seed).validate()
    }

    fn tree_config(&self, seed: u64) -> TreeConfig {
        TreeConfig {
            max_depth: self.max_depth,
            min_samples_leaf: self.min_samples_leaf,
            max_features: self.max_features,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub config: ForestConfig,
    pub n_classes: usize,
    pub feature_names: Vec<String>,
    pub trees: Vec<Tree>,
}

/// Tree `t` draws its bootstrap and feature samples from
/// `derive_seed(seed, t)`, so the result does not depend on thread count.
pub fn fit_random_forest(x: &Matrix, y: &[u8], cfg: &ForestConfig) -> Result<ForestModel> {
    cfg.validate()?;
    let n_classes = infer_n_classes(y).max(2);
    check_labels(x, y, n_classes)?;
    let binned = Binned::new(x);
    let n = y.len();
    let trees = (0..cfg.n_estimators)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(cfg.seed, t as u64);
            let mut r = rng(seed);
            let counts = cfg.bootstrap.then(|| {
                let mut m = vec![0u32; n];
                for _ in 0..n {
                    m[r.gen_range(0..n)] += 1;
                }
                m
            });
            grow_classifier(&binned, y, n_classes, &cfg.tree_config(seed), counts.as_deref(), &mut r)
        })
        .collect();
    Ok(ForestModel {
        config: cfg.clone(),
        n_classes,
        feature_names: x.names().to_vec(),
        trees,
    })
}

impl ForestModel {
    /// Mean of the trees' leaf class distributions.
    pub fn proba_row(&self, row: &[f64]) -> Vec<f64> {
        let mut p = vec![0.0; self.n_classes];
        for t in &self.trees {
            for (a, b) in p.iter_mut().zip(t.leaf(row)) {
                *a += b;
            }
        }
        let n = self.trees.len() as f64;
        p.iter_mut().for_each(|v| *v /= n);
        p
    }

    /// Each tree's vote, by its leaf argmax.
    pub fn votes_row(&self, row: &[f64]) -> Vec<usize> {
        let mut v = vec![0; self.n_classes];
        for t in &self.trees {
            v[super::matrix::argmax(t.leaf(row))] += 1;
        }
        v
    }

    /// Majority vote, ties to the lowest class code.
    pub fn predict_row(&self, row: &[f64]) -> u8 {
        let v = self.votes_row(row);
        let mut best = 0;
        for c in 1..v.len() {
            if v[c] > v[best] {
                best = c;
            }
        }
        best as u8
    }
}
