//! Multinomial regression with a grouped lasso penalty `λ Σ_j ‖W_j‖₂` on
//! each feature's coefficient row, fitted along a decreasing λ path by
//! accelerated majorize-minimize steps and tuned by cross-validated
//! misclassification.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linear::{LinearModel, Objective};
use super::matrix::{argmax, check_labels, infer_n_classes, Matrix};
use crate::error::{Error, Result};
use crate::sampling::FoldPlan;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LassoConfig {
    /// Explicit descending λ values; generated from the data when absent.
    pub lambda_path: Option<Vec<f64>>,
    pub n_lambda: usize,
    pub lambda_min_ratio: f64,
    /// Penalize coefficients on the unit-variance scale of each feature.
    pub standardize: bool,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for LassoConfig {
    fn default() -> Self {
        LassoConfig {
            lambda_path: None,
            n_lambda: 100,
            lambda_min_ratio: 1e-4,
            standardize: true,
            max_iter: 1000,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoModel {
    pub config: LassoConfig,
    pub n_classes: usize,
    pub feature_names: Vec<String>,
    pub lambda_path: Vec<f64>,
    /// Mean validation misclassification per λ (empty without folds).
    pub cv_error: Vec<f64>,
    pub lambda_index: usize,
    pub lambda: f64,
    pub linear: LinearModel,
    /// Features whose coefficient row is nonzero.
    pub selected: Vec<String>,
}

struct Scaled {
    x: Matrix,
    scale: Vec<f64>,
    /// Constant columns stay at zero.
    active: Vec<bool>,
}

fn standardize(x: &Matrix, on: bool) -> Scaled {
    let n = x.n_rows() as f64;
    let p = x.n_cols();
    let mut scale = vec![1.0; p];
    let mut active = vec![true; p];
    for j in 0..p {
        let col = x.column(j);
        let mean = col.iter().sum::<f64>() / n;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        if var <= 0.0 {
            active[j] = false;
        } else if on {
            scale[j] = var.sqrt();
        }
    }
    let data: Vec<f64> = (0..x.n_rows())
        .flat_map(|i| x.row(i).iter().zip(&scale).map(|(v, s)| v / s).collect::<Vec<_>>())
        .collect();
    Scaled {
        x: Matrix::new(x.n_rows(), p, data, x.names().to_vec()).expect("same shape"),
        scale,
        active,
    }
}

fn log_priors(y: &[u8], k: usize) -> Vec<f64> {
    let mut counts = vec![0.0; k];
    for &c in y {
        counts[c as usize] += 1.0;
    }
    let n = y.len() as f64;
    let logs: Vec<f64> = counts.iter().map(|c| (c / n).ln()).collect();
    let mean = logs.iter().sum::<f64>() / k as f64;
    logs.into_iter().map(|l| l - mean).collect()
}

/// `XᵀX / n` of the design with a trailing column of ones.
fn gram(x: &Matrix) -> Vec<f64> {
    let p = x.n_cols();
    let q = p + 1;
    let mut g = vec![0.0; q * q];
    let mut nz: Vec<(usize, f64)> = Vec::with_capacity(q);
    for i in 0..x.n_rows() {
        nz.clear();
        nz.extend(x.row(i).iter().copied().enumerate().filter(|&(_, v)| v != 0.0));
        nz.push((p, 1.0));
        for &(a, va) in &nz {
            for &(b, vb) in &nz {
                g[a * q + b] += va * vb;
            }
        }
    }
    let inv = 1.0 / x.n_rows() as f64;
    g.iter_mut().for_each(|v| *v *= inv);
    g
}

/// Softmax cross-entropy curvature never exceeds half the Gram matrix
/// (per class), so that quadratic majorizes the loss.
const CURVATURE: f64 = 0.5;
const MAX_SWEEPS: usize = 200;

struct Problem<'a> {
    obj: Objective<'a>,
    gram: Vec<f64>,
    active: &'a [bool],
    k: usize,
}

impl Problem<'_> {
    /// Accelerated majorize-minimize. Each step minimizes the quadratic
    /// bound at the extrapolated point plus the group penalty by block
    /// coordinate descent, so one data pass per step. Momentum restarts
    /// when it points against the step.
    fn solve(&self, lambda: f64, theta0: Vec<f64>, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
        let mut theta = theta0;
        let mut z = theta.clone();
        let mut tk = 1.0f64;
        for _ in 0..max_iter {
            let (f, g) = self.obj.loss_and_grad(&z);
            if !f.is_finite() {
                return Err(Error::NonFinite("grouped lasso objective"));
            }
            let scale = theta.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let next = self.bound_step(lambda, &z, &g, 1e-3 * tol * scale);
            let mut delta = 0.0f64;
            let mut agree = 0.0;
            for i in 0..next.len() {
                delta = delta.max((next[i] - theta[i]).abs());
                agree += (z[i] - next[i]) * (next[i] - theta[i]);
            }
            if agree > 0.0 {
                tk = 1.0;
                z = next.clone();
            } else {
                let tk1 = (1.0 + (1.0 + 4.0 * tk * tk).sqrt()) / 2.0;
                let mom = (tk - 1.0) / tk1;
                z = next.iter().zip(&theta).map(|(a, b)| a + mom * (a - b)).collect();
                tk = tk1;
            }
            theta = next;
            if delta < tol * scale {
                break;
            }
        }
        Ok(theta)
    }

    /// Minimizes `gᵀ(θ-z) + (c/2)(θ-z)ᵀ(G⊗I)(θ-z) + λ Σ_j ‖θ_j‖` over θ.
    fn bound_step(&self, lambda: f64, z: &[f64], g: &[f64], tol: f64) -> Vec<f64> {
        let k = self.k;
        let p = self.active.len();
        let q = p + 1;
        let mut next = z.to_vec();
        // Σ_l G_jl (next_l - z_l)
        let mut r = vec![0.0; q * k];
        let mut u = vec![0.0; k];
        for _ in 0..MAX_SWEEPS {
            let mut moved = 0.0f64;
            for j in 0..q {
                let gjj = self.gram[j * q + j];
                if j < p && !self.active[j] {
                    next[j * k..(j + 1) * k].iter_mut().for_each(|v| *v = 0.0);
                    continue;
                }
                if gjj <= 0.0 {
                    continue;
                }
                let h = CURVATURE * gjj;
                for c in 0..k {
                    u[c] = next[j * k + c] - (g[j * k + c] + CURVATURE * r[j * k + c]) / h;
                }
                let shrink = if j < p {
                    let nu = norm(&u);
                    if nu <= lambda / h {
                        0.0
                    } else {
                        1.0 - lambda / (h * nu)
                    }
                } else {
                    1.0
                };
                for c in 0..k {
                    let d = u[c] * shrink - next[j * k + c];
                    if d != 0.0 {
                        next[j * k + c] += d;
                        moved = moved.max(d.abs());
                        for l in 0..q {
                            r[l * k + c] += self.gram[l * q + j] * d;
                        }
                    }
                }
            }
            if moved < tol {
                break;
            }
        }
        next
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Smallest λ at which every coefficient block is zero, taken at the
/// intercept-only fit.
fn lambda_max(sc: &Scaled, y: &[u8], k: usize) -> f64 {
    let w = vec![1.0; y.len()];
    let obj = Objective::new(&sc.x, y, &w, k, false, 0.0);
    let p = sc.x.n_cols();
    let mut theta = vec![0.0; (p + 1) * k];
    theta[p * k..].copy_from_slice(&log_priors(y, k));
    let (_, g) = obj.loss_and_grad(&theta);
    (0..p)
        .filter(|&j| sc.active[j])
        .map(|j| norm(&g[j * k..(j + 1) * k]))
        .fold(0.0, f64::max)
}

pub fn default_lambda_path(x: &Matrix, y: &[u8], cfg: &LassoConfig) -> Vec<f64> {
    let k = infer_n_classes(y);
    let sc = standardize(x, cfg.standardize);
    let hi = lambda_max(&sc, y, k).max(f64::MIN_POSITIVE);
    let n = cfg.n_lambda.max(1);
    if n == 1 {
        return vec![hi];
    }
    let ratio = cfg.lambda_min_ratio.ln();
    (0..n)
        .map(|i| hi * (ratio * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Fits the whole path; returns one unscaled model per λ.
fn fit_path(x: &Matrix, y: &[u8], k: usize, path: &[f64], cfg: &LassoConfig) -> Result<Vec<LinearModel>> {
    let sc = standardize(x, cfg.standardize);
    let w = vec![1.0; y.len()];
    let prob = Problem {
        obj: Objective::new(&sc.x, y, &w, k, false, 0.0),
        gram: gram(&sc.x),
        active: &sc.active,
        k,
    };
    let p = x.n_cols();
    let mut theta = vec![0.0; (p + 1) * k];
    theta[p * k..].copy_from_slice(&log_priors(y, k));
    let mut out = Vec::with_capacity(path.len());
    for &lambda in path {
        theta = prob.solve(lambda, theta, cfg.tol, cfg.max_iter)?;
        let mut m = LinearModel::from_theta(p, k, false, &theta);
        for j in 0..p {
            for c in 0..k {
                m.weights[j * k + c] /= sc.scale[j];
            }
        }
        out.push(m);
    }
    Ok(out)
}

fn misclassified(m: &LinearModel, x: &Matrix, y: &[u8]) -> usize {
    (0..x.n_rows())
        .filter(|&i| argmax(&m.scores_row(x.row(i))) != y[i] as usize)
        .count()
}

/// Fits the grouped-lasso path and keeps the λ with the lowest mean
/// validation error over `folds` (ties go to the larger λ). Without folds
/// the last λ of the path is kept.
pub fn fit_multinomial_lr_lasso_path(
    x: &Matrix,
    y: &[u8],
    cfg: &LassoConfig,
    folds: Option<&FoldPlan>,
) -> Result<LassoModel> {
    let k = infer_n_classes(y).max(2);
    check_labels(x, y, k)?;
    let path = match &cfg.lambda_path {
        Some(p) if p.is_empty() => return Err(Error::Config("empty lambda path".into())),
        Some(p) => {
            if p.iter().any(|l| !(*l >= 0.0)) || p.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::Config("lambda path must be non-negative and descending".into()));
            }
            p.clone()
        }
        None => default_lambda_path(x, y, cfg),
    };

    let (cv_error, best) = match folds {
        Some(plan) if path.len() > 1 => {
            if plan.n_samples() != y.len() {
                return Err(Error::Mismatch {
                    left: plan.n_samples(),
                    right: y.len(),
                });
            }
            let errors = (0..plan.k)
                .into_par_iter()
                .map(|f| {
                    let tr = plan.train_indices(f);
                    let va = &plan.folds[f];
                    let ytr: Vec<u8> = tr.iter().map(|&i| y[i]).collect();
                    let yva: Vec<u8> = va.iter().map(|&i| y[i]).collect();
                    let xva = x.select_rows(va);
                    let models = fit_path(&x.select_rows(&tr), &ytr, k, &path, cfg)?;
                    Ok(models.iter().map(|m| misclassified(m, &xva, &yva)).collect::<Vec<_>>())
                })
                .collect::<Result<Vec<Vec<usize>>>>()?;
            let n = y.len() as f64;
            let mean: Vec<f64> = (0..path.len())
                .map(|l| errors.iter().map(|e| e[l]).sum::<usize>() as f64 / n)
                .collect();
            let mut best = 0;
            for (l, &e) in mean.iter().enumerate() {
                if e < mean[best] {
                    best = l;
                }
            }
            (mean, best)
        }
        _ => (Vec::new(), path.len() - 1),
    };

    let models = fit_path(x, y, k, &path[..=best], cfg)?;
    let linear = models.into_iter().last().expect("non-empty path");
    let selected = linear
        .active_features()
        .into_iter()
        .map(|j| x.names()[j].clone())
        .collect();
    Ok(LassoModel {
        config: cfg.clone(),
        n_classes: k,
        feature_names: x.names().to_vec(),
        lambda: path[best],
        lambda_index: best,
        lambda_path: path,
        cv_error,
        linear,
        selected,
    })
}

/// Nonzero block counts along a path, for diagnostics.
pub fn path_support_sizes(x: &Matrix, y: &[u8], cfg: &LassoConfig, path: &[f64]) -> Result<Vec<usize>> {
    let k = infer_n_classes(y).max(2);
    check_labels(x, y, k)?;
    Ok(fit_path(x, y, k, path, cfg)?
        .iter()
        .map(|m| m.active_features().len())
        .collect())
}
