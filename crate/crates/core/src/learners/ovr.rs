//! One-vs-rest logistic regression: one binary model per class.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linear::{fit_binary_lr, sigmoid, LinearModel, LrConfig};
use super::matrix::{check_labels, infer_n_classes, Matrix};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvrModel {
    pub config: LrConfig,
    pub n_classes: usize,
    pub feature_names: Vec<String>,
    /// One binary model per class, or a single model for two classes
    /// (positive class 1).
    pub binary: Vec<LinearModel>,
}

/// Binarizes `y` per class and fits a sigmoid model to each, with class
/// weights computed on each binary problem.
pub fn one_vs_rest(x: &Matrix, y: &[u8], cfg: &LrConfig) -> Result<OvrModel> {
    let k = infer_n_classes(y).max(2);
    check_labels(x, y, k)?;
    let binary = if k == 2 {
        vec![fit_binary_lr(x, y, cfg)?.linear]
    } else {
        (0..k)
            .into_par_iter()
            .map(|c| {
                let yc: Vec<u8> = y.iter().map(|&v| u8::from(v as usize == c)).collect();
                fit_binary_lr(x, &yc, cfg).map(|m| m.linear)
            })
            .collect::<Result<Vec<_>>>()?
    };
    Ok(OvrModel {
        config: cfg.clone(),
        n_classes: k,
        feature_names: x.names().to_vec(),
        binary,
    })
}

impl OvrModel {
    /// Per-class `w·x + b`; with two classes `[-z, z]`.
    pub fn scores_row(&self, row: &[f64]) -> Vec<f64> {
        if self.binary.len() == 1 {
            let z = self.binary[0].scores_row(row)[0];
            return vec![-z, z];
        }
        self.binary.iter().map(|m| m.scores_row(row)[0]).collect()
    }

    /// Raw per-class positive probabilities.
    pub fn binary_proba_row(&self, row: &[f64]) -> Vec<f64> {
        if self.binary.len() == 1 {
            return self.binary[0].proba_row(row);
        }
        self.scores_row(row).into_iter().map(sigmoid).collect()
    }

    pub fn proba_row(&self, row: &[f64]) -> Vec<f64> {
        let p = self.binary_proba_row(row);
        let s: f64 = p.iter().sum();
        if s > 0.0 {
            p.iter().map(|v| v / s).collect()
        } else {
            vec![1.0 / p.len() as f64; p.len()]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::linear::Penalty;
    use crate::learners::matrix::argmax;

    #[test]
    fn two_classes_collapse_to_binary() {
        let rows: Vec<Vec<f64>> = (0..30).map(|i| vec![f64::from(i % 6), f64::from(i % 4)]).collect();
        let y: Vec<u8> = (0..30).map(|i| u8::from(i % 6 >= 3 || i % 4 == 0)).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let cfg = LrConfig {
            penalty: Penalty::L2,
            ..LrConfig::default()
        };
        let o = one_vs_rest(&x, &y, &cfg).unwrap();
        let b = fit_binary_lr(&x, &y, &cfg).unwrap();
        for i in 0..x.n_rows() {
            assert_eq!(argmax(&o.proba_row(x.row(i))), argmax(&b.linear.proba_row(x.row(i))));
        }
    }
}
