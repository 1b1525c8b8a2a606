//! Exhaustive cross-validated grid search.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::matrix::Matrix;
use super::model::{Family, ModelConfig};
use crate::error::{Error, Result};
use crate::sampling::FoldPlan;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub params: Map<String, Value>,
    pub mean_score: f64,
    pub fold_scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchReport {
    pub family: Family,
    pub best_params: Map<String, Value>,
    pub best_score: f64,
    /// Every point in enumeration order.
    pub results: Vec<GridPoint>,
}

/// Cartesian product in row-major order over the grid's key order (the last
/// key varies fastest). A scalar value counts as a one-element list.
pub fn grid_points(grid: &Map<String, Value>) -> Result<Vec<Map<String, Value>>> {
    if grid.is_empty() {
        return Err(Error::Config("empty parameter grid".into()));
    }
    let mut points = vec![Map::new()];
    for (key, values) in grid {
        let values = match values {
            Value::Array(v) if v.is_empty() => {
                return Err(Error::Config(format!("grid key `{key}` has no values")))
            }
            Value::Array(v) => v.clone(),
            other => vec![other.clone()],
        };
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.insert(key.clone(), v.clone());
                    q
                })
            })
            .collect();
    }
    Ok(points)
}

/// Accuracy of a model fitted with `cfg` on each fold's complement.
pub fn cv_scores(cfg: &ModelConfig, folds: &FoldPlan, x: &Matrix, y: &[u8]) -> Result<Vec<f64>> {
    if folds.n_samples() != y.len() {
        return Err(Error::Mismatch {
            left: folds.n_samples(),
            right: y.len(),
        });
    }
    (0..folds.k)
        .into_par_iter()
        .map(|f| {
            let tr = folds.train_indices(f);
            let va = &folds.folds[f];
            let ytr: Vec<u8> = tr.iter().map(|&i| y[i]).collect();
            let model = cfg.fit(&x.select_rows(&tr), &ytr, None)?;
            let pred = model.predict(&x.select_rows(va))?;
            let hits = pred.iter().zip(va).filter(|(p, &i)| **p == y[i]).count();
            Ok(hits as f64 / va.len() as f64)
        })
        .collect()
}

/// `base` holds fixed parameters that every grid point extends. Points that
/// resolve to the same effective configuration are fitted once.
pub fn grid_search_cv(
    family: Family,
    grid: &Map<String, Value>,
    base: &Map<String, Value>,
    seed: u64,
    folds: &FoldPlan,
    x: &Matrix,
    y: &[u8],
) -> Result<GridSearchReport> {
    let points = grid_points(grid)?;
    let attach = |p: &Map<String, Value>, e: Error| Error::GridPoint {
        params: Value::Object(p.clone()).to_string(),
        source: Box::new(e),
    };
    let configs = points
        .iter()
        .map(|p| {
            let mut params = base.clone();
            params.extend(p.clone());
            ModelConfig::resolve(family, &params, seed).map_err(|e| attach(p, e))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut unique: BTreeMap<String, usize> = BTreeMap::new();
    for (i, c) in configs.iter().enumerate() {
        unique.entry(c.fit_key()).or_insert(i);
    }
    let firsts: Vec<usize> = unique.values().copied().collect();
    let scored: BTreeMap<usize, Vec<f64>> = firsts
        .into_par_iter()
        .map(|i| {
            cv_scores(&configs[i], folds, x, y)
                .map(|s| (i, s))
                .map_err(|e| attach(&points[i], e))
        })
        .collect::<Result<_>>()?;
    let results: Vec<GridPoint> = points
        .into_iter()
        .zip(&configs)
        .map(|(p, c)| {
            let fold_scores = scored[&unique[&c.fit_key()]].clone();
            let mean_score = fold_scores.iter().sum::<f64>() / fold_scores.len() as f64;
            GridPoint {
                params: p,
                mean_score,
                fold_scores,
            }
        })
        .collect();
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.mean_score > results[best].mean_score {
            best = i;
        }
    }
    Ok(GridSearchReport {
        family,
        best_params: results[best].params.clone(),
        best_score: results[best].mean_score,
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn enumeration_is_row_major() {
        let g = json!({"a": [1, 2], "b": ["x", "y", "z"]});
        let pts = grid_points(g.as_object().unwrap()).unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[1], *json!({"a": 1, "b": "y"}).as_object().unwrap());
        assert_eq!(pts[3], *json!({"a": 2, "b": "x"}).as_object().unwrap());
        assert!(grid_points(&Map::new()).is_err());
        assert!(grid_points(json!({"a": []}).as_object().unwrap()).is_err());
    }
}
