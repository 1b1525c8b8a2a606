//! Softmax and binary logistic regression sharing one objective and one
//! first-order solver.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix::{check_labels, Matrix};
use crate::error::{Error, Result};

const CHUNK: usize = 2048;

/// Linear scores `x·W + b`. With `binary` there is a single output whose
/// sigmoid is the positive-class probability; otherwise one output per
/// class fed through softmax.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub n_features: usize,
    pub n_outputs: usize,
    pub binary: bool,
    /// Row-major `n_features × n_outputs`.
    pub weights: Vec<f64>,
    pub intercept: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(n_features: usize, n_outputs: usize, binary: bool) -> Self {
        LinearModel {
            n_features,
            n_outputs,
            binary,
            weights: vec![0.0; n_features * n_outputs],
            intercept: vec![0.0; n_outputs],
        }
    }

    pub(crate) fn from_theta(n_features: usize, n_outputs: usize, binary: bool, theta: &[f64]) -> Self {
        let split = n_features * n_outputs;
        LinearModel {
            n_features,
            n_outputs,
            binary,
            weights: theta[..split].to_vec(),
            intercept: theta[split..].to_vec(),
        }
    }

    pub fn scores_row(&self, row: &[f64]) -> Vec<f64> {
        let mut z = self.intercept.clone();
        scores_into(&self.weights, self.n_outputs, row, &mut z);
        z
    }

    /// Class probabilities; a binary model yields `[1 − σ(z), σ(z)]`.
    pub fn proba_row(&self, row: &[f64]) -> Vec<f64> {
        let z = self.scores_row(row);
        if self.binary {
            let p = sigmoid(z[0]);
            vec![1.0 - p, p]
        } else {
            softmax(&z)
        }
    }

    /// Feature indices whose coefficient row is not all zero.
    pub fn active_features(&self) -> Vec<usize> {
        (0..self.n_features)
            .filter(|&j| {
                self.weights[j * self.n_outputs..(j + 1) * self.n_outputs]
                    .iter()
                    .any(|&w| w != 0.0)
            })
            .collect()
    }
}

fn scores_into(weights: &[f64], k: usize, row: &[f64], z: &mut [f64]) {
    for (j, &xj) in row.iter().enumerate() {
        if xj != 0.0 {
            let w = &weights[j * k..(j + 1) * k];
            for (zk, wk) in z.iter_mut().zip(w) {
                *zk += xj * wk;
            }
        }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub fn softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

fn log_sum_exp(z: &[f64]) -> f64 {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// Weighted cross-entropy plus an optional ridge term, divided by the
/// number of rows:
/// `[Σ wᵢ ℓᵢ + (α/2)‖W‖²] / N`, intercepts unpenalized.
pub(crate) struct Objective<'a> {
    pub x: &'a Matrix,
    /// Class codes, or 0/1 in the binary case.
    pub y: &'a [u8],
    pub sample_weight: &'a [f64],
    pub n_outputs: usize,
    pub binary: bool,
    pub alpha: f64,
    nz: SparseRows,
}

/// Nonzero entries of each row; encoded designs are mostly zeros.
struct SparseRows {
    start: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

impl SparseRows {
    fn new(x: &Matrix) -> Self {
        let mut start = Vec::with_capacity(x.n_rows() + 1);
        let mut col = Vec::new();
        let mut val = Vec::new();
        start.push(0);
        for i in 0..x.n_rows() {
            for (j, &v) in x.row(i).iter().enumerate() {
                if v != 0.0 {
                    col.push(j);
                    val.push(v);
                }
            }
            start.push(col.len());
        }
        SparseRows { start, col, val }
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.start[i]..self.start[i + 1];
        self.col[r.clone()].iter().copied().zip(self.val[r].iter().copied())
    }
}

impl<'a> Objective<'a> {
    pub fn new(
        x: &'a Matrix,
        y: &'a [u8],
        sample_weight: &'a [f64],
        n_outputs: usize,
        binary: bool,
        alpha: f64,
    ) -> Self {
        Objective {
            x,
            y,
            sample_weight,
            n_outputs,
            binary,
            alpha,
            nz: SparseRows::new(x),
        }
    }

    pub fn dim(&self) -> usize {
        (self.x.n_cols() + 1) * self.n_outputs
    }

    /// Loss part only (no ridge term), mean over rows, with its gradient.
    pub fn loss_and_grad(&self, theta: &[f64]) -> (f64, Vec<f64>) {
        let p = self.x.n_cols();
        let k = self.n_outputs;
        let (weights, intercept) = theta.split_at(p * k);
        let n = self.x.n_rows();
        let partials: Vec<(f64, Vec<f64>)> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut loss = 0.0;
                let mut grad = vec![0.0; theta.len()];
                let mut z = vec![0.0; k];
                let mut r = vec![0.0; k];
                for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                    z.copy_from_slice(intercept);
                    for (j, xj) in self.nz.row(i) {
                        for (zk, wk) in z.iter_mut().zip(&weights[j * k..(j + 1) * k]) {
                            *zk += xj * wk;
                        }
                    }
                    let w = self.sample_weight[i];
                    let yi = self.y[i] as usize;
                    if self.binary {
                        let zi = z[0];
                        let t = yi as f64;
                        loss += w * (zi.max(0.0) + (-zi.abs()).exp().ln_1p() - t * zi);
                        r[0] = w * (sigmoid(zi) - t);
                    } else {
                        let lse = log_sum_exp(&z);
                        loss += w * (lse - z[yi]);
                        for (rk, zk) in r.iter_mut().zip(&z) {
                            *rk = w * (zk - lse).exp();
                        }
                        r[yi] -= w;
                    }
                    for (j, xj) in self.nz.row(i) {
                        for (gk, rk) in grad[j * k..(j + 1) * k].iter_mut().zip(&r) {
                            *gk += xj * rk;
                        }
                    }
                    for (gk, rk) in grad[p * k..].iter_mut().zip(&r) {
                        *gk += rk;
                    }
                }
                (loss, grad)
            })
            .collect();
        let mut loss = 0.0;
        let mut grad = vec![0.0; theta.len()];
        for (l, g) in partials {
            loss += l;
            for (a, b) in grad.iter_mut().zip(g) {
                *a += b;
            }
        }
        let inv = 1.0 / n as f64;
        grad.iter_mut().for_each(|g| *g *= inv);
        (loss * inv, grad)
    }

    pub fn value_and_grad(&self, theta: &[f64]) -> (f64, Vec<f64>) {
        let (mut f, mut g) = self.loss_and_grad(theta);
        if self.alpha > 0.0 {
            let pk = self.x.n_cols() * self.n_outputs;
            let scale = self.alpha / self.x.n_rows() as f64;
            let mut sq = 0.0;
            for (gj, wj) in g[..pk].iter_mut().zip(&theta[..pk]) {
                *gj += scale * wj;
                sq += wj * wj;
            }
            f += 0.5 * scale * sq;
        }
        (f, g)
    }
}

pub(crate) struct SolverOutcome {
    pub theta: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Gradient descent with Barzilai-Borwein trial steps and Armijo
/// backtracking; stops once the gradient max-norm drops below `tol`.
pub(crate) fn minimize(
    f: impl Fn(&[f64]) -> (f64, Vec<f64>),
    theta0: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<SolverOutcome> {
    let mut theta = theta0;
    let (mut fx, mut g) = f(&theta);
    let mut step = 1.0;
    for it in 0..max_iter {
        if !fx.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("logistic objective"));
        }
        let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if gmax < tol {
            return Ok(SolverOutcome {
                theta,
                iterations: it,
                converged: true,
            });
        }
        let gg: f64 = g.iter().map(|v| v * v).sum();
        let mut t = step;
        let mut accepted = None;
        for _ in 0..60 {
            let cand: Vec<f64> = theta.iter().zip(&g).map(|(a, b)| a - t * b).collect();
            let (fc, gc) = f(&cand);
            if fc.is_finite() && fc <= fx - 1e-4 * t * gg {
                accepted = Some((cand, fc, gc));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, fc, gc)) = accepted else {
            // no descent possible at machine precision
            return Ok(SolverOutcome {
                theta,
                iterations: it,
                converged: gmax < tol.sqrt(),
            });
        };
        let mut ss = 0.0;
        let mut sy = 0.0;
        for i in 0..theta.len() {
            let s = cand[i] - theta[i];
            let yv = gc[i] - g[i];
            ss += s * s;
            sy += s * yv;
        }
        step = if sy > 0.0 { (ss / sy).clamp(1e-10, 1e10) } else { t * 2.0 };
        theta = cand;
        fx = fc;
        g = gc;
    }
    let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(SolverOutcome {
        theta,
        iterations: max_iter,
        converged: gmax < tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Penalty {
    None,
    #[serde(alias = "L2")]
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ClassWeight {
    #[default]
    Uniform,
    Balanced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LrConfig {
    pub penalty: Penalty,
    /// Inverse regularization strength.
    #[serde(rename = "C")]
    pub c: f64,
    pub class_weight: ClassWeight,
    pub max_iter: usize,
    pub tol: f64,
    /// Accepted for compatibility with solver-named grids; one solver is used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<String>,
}

impl Default for LrConfig {
    fn default() -> Self {
        LrConfig {
            penalty: Penalty::L2,
            c: 1.0,
            class_weight: ClassWeight::Uniform,
            max_iter: 1000,
            tol: 1e-6,
            solver: None,
        }
    }
}

impl LrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) || !(self.tol > 0.0) {
            return Err(Error::Config(format!(
                "logistic regression needs C > 0 and tol > 0 (C={}, tol={})",
                self.c, self.tol
            )));
        }
        Ok(())
    }

    fn alpha(&self) -> f64 {
        match self.penalty {
            Penalty::None => 0.0,
            Penalty::L2 => 1.0 / self.c,
        }
    }
}

/// Per-sample weights: all ones, or `N / (C · n_c)` for balanced.
pub fn sample_weights(y: &[u8], n_classes: usize, cw: ClassWeight) -> Vec<f64> {
    match cw {
        ClassWeight::Uniform => vec![1.0; y.len()],
        ClassWeight::Balanced => {
            let mut counts = vec![0usize; n_classes];
            for &c in y {
                counts[c as usize] += 1;
            }
            let n = y.len() as f64;
            let per_class: Vec<f64> = counts
                .iter()
                .map(|&m| if m == 0 { 0.0 } else { n / (n_classes as f64 * m as f64) })
                .collect();
            y.iter().map(|&c| per_class[c as usize]).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub config: LrConfig,
    pub n_classes: usize,
    pub feature_names: Vec<String>,
    pub linear: LinearModel,
    pub iterations: usize,
    pub converged: bool,
}

fn fit_linear(x: &Matrix, y: &[u8], n_classes: usize, binary: bool, cfg: &LrConfig) -> Result<LogisticModel> {
    cfg.validate()?;
    check_labels(x, y, n_classes)?;
    let weights = sample_weights(y, n_classes, cfg.class_weight);
    let n_outputs = if binary { 1 } else { n_classes };
    let obj = Objective::new(x, y, &weights, n_outputs, binary, cfg.alpha());
    let out = minimize(|t| obj.value_and_grad(t), vec![0.0; obj.dim()], cfg.tol, cfg.max_iter)?;
    Ok(LogisticModel {
        config: cfg.clone(),
        n_classes,
        feature_names: x.names().to_vec(),
        linear: LinearModel::from_theta(x.n_cols(), n_outputs, binary, &out.theta),
        iterations: out.iterations,
        converged: out.converged,
    })
}

/// Softmax regression over `n_classes` (inferred from `y`).
pub fn fit_multinomial_lr(x: &Matrix, y: &[u8], cfg: &LrConfig) -> Result<LogisticModel> {
    let n_classes = super::matrix::infer_n_classes(y).max(2);
    fit_linear(x, y, n_classes, false, cfg)
}

/// Sigmoid regression on 0/1 labels.
pub fn fit_binary_lr(x: &Matrix, y: &[u8], cfg: &LrConfig) -> Result<LogisticModel> {
    fit_linear(x, y, 2, true, cfg)
}

/// Mean objective and gradient of softmax regression at `theta`
/// (`W` row-major `features × classes`, then the intercepts). `c` adds the
/// ridge term `‖W‖² / (2C)` before averaging.
pub fn objective_and_gradient(
    x: &Matrix,
    y: &[u8],
    sample_weight: &[f64],
    n_classes: usize,
    c: Option<f64>,
    theta: &[f64],
) -> Result<(f64, Vec<f64>)> {
    if sample_weight.len() != y.len() || y.len() != x.n_rows() {
        return Err(Error::Mismatch {
            left: y.len(),
            right: x.n_rows(),
        });
    }
    let obj = Objective::new(x, y, sample_weight, n_classes, false, c.map_or(0.0, |c| 1.0 / c));
    if theta.len() != obj.dim() {
        return Err(Error::Mismatch {
            left: theta.len(),
            right: obj.dim(),
        });
    }
    Ok(obj.value_and_grad(theta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable() -> (Matrix, Vec<u8>) {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64 / 10.0 - 2.0, 1.0]).collect();
        let y = (0..40).map(|i| u8::from(i >= 20)).collect();
        (Matrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn separable_fits_perfectly() {
        let (x, y) = separable();
        let cfg = LrConfig {
            penalty: Penalty::None,
            ..LrConfig::default()
        };
        let m = fit_multinomial_lr(&x, &y, &cfg).unwrap();
        for i in 0..x.n_rows() {
            let p = m.linear.proba_row(x.row(i));
            assert_eq!(u8::from(p[1] > p[0]), y[i]);
        }
    }

    #[test]
    fn balanced_weights_formula() {
        let w = sample_weights(&[0, 0, 0, 1], 2, ClassWeight::Balanced);
        assert_eq!(w, vec![4.0 / 6.0, 4.0 / 6.0, 4.0 / 6.0, 2.0]);
        let total: f64 = w.iter().sum();
        assert!((total - 4.0).abs() < 1e-12);
    }

    #[test]
    fn softmax_and_sigmoid_stable() {
        let p = softmax(&[1000.0, 1000.0]);
        assert_eq!(p, vec![0.5, 0.5]);
        assert_eq!(sigmoid(-800.0), 0.0);
        assert_eq!(sigmoid(800.0), 1.0);
    }

    #[test]
    fn config_validation_and_json() {
        assert!(LrConfig {
            c: 0.0,
            ..LrConfig::default()
        }
        .validate()
        .is_err());
        let cfg: LrConfig =
            serde_json::from_str(r#"{"C": 10.0, "penalty": "none", "solver": "saga", "class_weight": "balanced"}"#)
                .unwrap();
        assert_eq!(cfg.c, 10.0);
        assert_eq!(cfg.penalty, Penalty::None);
        assert!(serde_json::from_str::<LrConfig>(r#"{"gamma": 1}"#).is_err());
    }
}
