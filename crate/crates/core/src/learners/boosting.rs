//! Multiclass gradient boosting with second-order (Newton) regression trees
//! on the softmax log-loss.

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linear::softmax;
use super::matrix::{check_labels, infer_n_classes, Matrix};
use super::tree::{Binned, Criterion, Grower, Tree};
use crate::error::{Error, Result};
use crate::sampling::{derive_seed, rng};

/// Smallest hessian sum a child may carry; also the leaf-value damping.
pub const HESSIAN_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostConfig {
    pub learning_rate: f64,
    pub n_estimators: usize,
    pub colsample_bytree: f64,
    pub max_depth: usize,
    pub seed: u64,
}

impl Default for BoostConfig {
    fn default() -> Self {
        BoostConfig {
            learning_rate: 0.1,
            n_estimators: 100,
            colsample_bytree: 1.0,
            max_depth: 6,
            seed: 0,
        }
    }
}

impl BoostConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning_rate {} must be >= 0", self.learning_rate)));
        }
        if !(self.colsample_bytree > 0.0 && self.colsample_bytree <= 1.0) {
            return Err(Error::Config(format!(
                "colsample_bytree {} not in (0, 1]",
                self.colsample_bytree
            )));
        }
        if self.max_depth == 0 {
            return Err(Error::Config("max_depth must be at least 1".into()));
        }
        Ok(())
    }
}

struct Newton {
    eta: f64,
}

// stats are [g, h]
impl Criterion for Newton {
    fn dim(&self) -> usize {
        2
    }
    fn score(&self, s: &[f64]) -> f64 {
        s[0] * s[0] / (s[1] + HESSIAN_FLOOR)
    }
    fn admissible(&self, s: &[f64]) -> bool {
        s[1] >= HESSIAN_FLOOR
    }
    fn is_terminal(&self, s: &[f64]) -> bool {
        s[1] < 2.0 * HESSIAN_FLOOR
    }
    fn leaf_value(&self, s: &[f64]) -> Vec<f64> {
        vec![-self.eta * s[0] / (s[1] + HESSIAN_FLOOR)]
    }
    fn min_gain(&self, _: &[f64]) -> f64 {
        1e-12
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostModel {
    pub config: BoostConfig,
    pub n_classes: usize,
    pub feature_names: Vec<String>,
    /// Starting raw score per class: log prior.
    pub base_score: Vec<f64>,
    /// `rounds[t][c]` is class `c`'s tree in round `t`.
    pub rounds: Vec<Vec<Tree>>,
    /// Mean training log-loss after each round.
    pub train_loss: Vec<f64>,
}

fn log_loss(f: &[f64], y: &[u8], k: usize) -> f64 {
    let n = y.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let row = &f[i * k..(i + 1) * k];
            let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + row.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
            lse - row[y[i] as usize]
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum::<f64>()
        / n as f64
}

pub fn fit_gradient_boosting(x: &Matrix, y: &[u8], cfg: &BoostConfig) -> Result<BoostModel> {
    cfg.validate()?;
    let k = infer_n_classes(y).max(2);
    check_labels(x, y, k)?;
    let n = y.len();
    let p_all = x.n_cols();
    let mut counts = vec![0usize; k];
    for &c in y {
        counts[c as usize] += 1;
    }
    let base_score: Vec<f64> = counts.iter().map(|&m| (m as f64 / n as f64).ln()).collect();
    let binned = Binned::new(x);
    let crit = Newton {
        eta: cfg.learning_rate,
    };
    let n_cols = ((cfg.colsample_bytree * p_all as f64).ceil() as usize).clamp(1, p_all.max(1));

    let mut f: Vec<f64> = (0..n).flat_map(|_| base_score.iter().copied()).collect();
    let mut rounds = Vec::with_capacity(cfg.n_estimators);
    let mut train_loss = Vec::with_capacity(cfg.n_estimators);
    let all: Vec<u32> = (0..n as u32).collect();
    for t in 0..cfg.n_estimators {
        let mut candidates: Vec<usize> = if n_cols < p_all {
            sample(&mut rng(derive_seed(cfg.seed, t as u64)), p_all, n_cols).into_vec()
        } else {
            (0..p_all).collect()
        };
        candidates.sort_unstable();
        let proba: Vec<f64> = f.par_chunks(k).flat_map_iter(softmax).collect();
        let trees: Vec<Tree> = (0..k)
            .into_par_iter()
            .map(|c| {
                let mut stats = vec![0.0; 2 * n];
                for i in 0..n {
                    let p = proba[i * k + c];
                    stats[2 * i] = p - f64::from(u8::from(y[i] as usize == c));
                    stats[2 * i + 1] = p * (1.0 - p);
                }
                let grower = Grower {
                    binned: &binned,
                    criterion: &crit,
                    stats: &stats,
                    max_depth: Some(cfg.max_depth),
                    max_features: None,
                    candidates: &candidates,
                };
                // no per-node sampling, so the stream is unused
                grower.grow(all.clone(), &mut rng(0))
            })
            .collect();
        f.par_chunks_mut(k).enumerate().for_each(|(i, row)| {
            for (c, tree) in trees.iter().enumerate() {
                row[c] += tree.leaf(x.row(i))[0];
            }
        });
        let loss = log_loss(&f, y, k);
        if !loss.is_finite() {
            return Err(Error::NonFinite("boosting training loss"));
        }
        train_loss.push(loss);
        rounds.push(trees);
    }
    Ok(BoostModel {
        config: cfg.clone(),
        n_classes: k,
        feature_names: x.names().to_vec(),
        base_score,
        rounds,
        train_loss,
    })
}

impl BoostModel {
    pub fn scores_row(&self, row: &[f64]) -> Vec<f64> {
        let mut f = self.base_score.clone();
        for trees in &self.rounds {
            for (v, t) in f.iter_mut().zip(trees) {
                *v += t.leaf(row)[0];
            }
        }
        f
    }

    pub fn proba_row(&self, row: &[f64]) -> Vec<f64> {
        softmax(&self.scores_row(row))
    }
}
