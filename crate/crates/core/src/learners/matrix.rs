use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tabular::Table;

/// Dense row-major feature matrix with column names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
    names: Vec<String>,
}

impl Matrix {
    pub fn new(n_rows: usize, n_cols: usize, data: Vec<f64>, names: Vec<String>) -> Result<Self> {
        if data.len() != n_rows * n_cols {
            return Err(Error::Mismatch {
                left: data.len(),
                right: n_rows * n_cols,
            });
        }
        if names.len() != n_cols {
            return Err(Error::Mismatch {
                left: names.len(),
                right: n_cols,
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("feature matrix"));
        }
        Ok(Matrix {
            n_rows,
            n_cols,
            data,
            names,
        })
    }

    /// Builds from rows, naming columns `x0, x1, ...`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != n_cols) {
            return Err(Error::Mismatch {
                left: bad.len(),
                right: n_cols,
            });
        }
        let names = (0..n_cols).map(|j| format!("x{j}")).collect();
        Self::new(rows.len(), n_cols, rows.concat(), names)
    }

    /// Pulls the named numeric columns out of a table. Missing values are
    /// rejected.
    pub fn from_table(t: &Table, features: &[String]) -> Result<Self> {
        let cols = features
            .iter()
            .map(|f| {
                t.column(f)?.as_numeric().ok_or_else(|| Error::WrongKind {
                    column: f.clone(),
                    expected: "numeric",
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut data = Vec::with_capacity(t.n_rows() * features.len());
        for r in 0..t.n_rows() {
            for (c, name) in cols.iter().zip(features) {
                data.push(c[r].ok_or_else(|| Error::WrongKind {
                    column: name.clone(),
                    expected: "free of missing values",
                })?);
            }
        }
        Self::new(t.n_rows(), features.len(), data, features.to_vec())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.get(i, j)).collect()
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * self.n_cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Matrix {
            n_rows: rows.len(),
            n_cols: self.n_cols,
            data,
            names: self.names.clone(),
        }
    }

    /// Checks that `self` has the columns a model was trained on.
    pub fn check_features(&self, expected: &[String]) -> Result<()> {
        if self.names != expected {
            return Err(Error::Config(format!(
                "feature mismatch: model expects {} columns, matrix has {}",
                expected.len(),
                self.n_cols
            )));
        }
        Ok(())
    }
}

/// Validates training labels: same length as `x`, codes below `n_classes`,
/// every class present.
pub fn check_labels(x: &Matrix, y: &[u8], n_classes: usize) -> Result<()> {
    if x.n_rows() != y.len() {
        return Err(Error::Mismatch {
            left: x.n_rows(),
            right: y.len(),
        });
    }
    let mut seen = vec![false; n_classes];
    for &c in y {
        if c as usize >= n_classes {
            return Err(Error::OutOfBounds {
                what: "class code",
                detail: format!("{c} with {n_classes} classes"),
            });
        }
        seen[c as usize] = true;
    }
    if n_classes < 2 {
        return Err(Error::SingleClass);
    }
    match seen.iter().position(|s| !s) {
        Some(c) => Err(Error::AbsentClass(c)),
        None => Ok(()),
    }
}

/// Number of classes implied by the largest code.
pub fn infer_n_classes(y: &[u8]) -> usize {
    y.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
}

/// Index of the largest value, first one on ties.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate().skip(1) {
        if *x > v[best] {
            best = i;
        }
    }
    best
}
