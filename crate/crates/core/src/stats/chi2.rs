use std::collections::BTreeMap;

use serde::Serialize;

use super::gamma::chi2_sf;
use crate::error::{Error, Result};
use crate::tabular::{Column, Table};

/// Observed joint counts of two categorical variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContingencyTable {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub observed: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub min_expected: f64,
    /// Every expected count is at least 5.
    pub assumption_ok: bool,
}

impl ContingencyTable {
    pub fn from_counts(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        observed: Vec<Vec<u64>>,
    ) -> Result<Self> {
        if observed.len() != row_labels.len() {
            return Err(Error::Mismatch {
                left: observed.len(),
                right: row_labels.len(),
            });
        }
        if let Some(bad) = observed.iter().find(|r| r.len() != col_labels.len()) {
            return Err(Error::Mismatch {
                left: bad.len(),
                right: col_labels.len(),
            });
        }
        Ok(ContingencyTable {
            row_labels,
            col_labels,
            observed,
        })
    }

    /// Builds a table with numbered labels, mostly for tests.
    pub fn from_matrix(observed: Vec<Vec<u64>>) -> Result<Self> {
        let r = observed.len();
        let c = observed.first().map_or(0, Vec::len);
        Self::from_counts(
            (0..r).map(|i| i.to_string()).collect(),
            (0..c).map(|j| j.to_string()).collect(),
            observed,
        )
    }

    /// Cross-tabulates two equally long label sequences. Labels are sorted
    /// lexicographically; rows where either side is missing are skipped.
    pub fn from_labels<A, B>(a: A, b: B) -> Result<Self>
    where
        A: ExactSizeIterator<Item = Option<String>>,
        B: ExactSizeIterator<Item = Option<String>>,
    {
        if a.len() != b.len() {
            return Err(Error::Mismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        let mut joint: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
        let mut cols: BTreeMap<String, ()> = BTreeMap::new();
        for (x, y) in a.zip(b) {
            if let (Some(x), Some(y)) = (x, y) {
                cols.insert(y.clone(), ());
                *joint.entry(x).or_default().entry(y).or_default() += 1;
            }
        }
        let col_labels: Vec<String> = cols.into_keys().collect();
        let mut row_labels = Vec::with_capacity(joint.len());
        let mut observed = Vec::with_capacity(joint.len());
        for (label, row) in joint {
            observed.push(
                col_labels
                    .iter()
                    .map(|c| row.get(c).copied().unwrap_or(0))
                    .collect(),
            );
            row_labels.push(label);
        }
        Self::from_counts(row_labels, col_labels, observed)
    }

    pub fn n_rows(&self) -> usize {
        self.observed.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn total(&self) -> u64 {
        self.observed.iter().flatten().sum()
    }

    pub fn row_totals(&self) -> Vec<u64> {
        self.observed.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_totals(&self) -> Vec<u64> {
        let mut out = vec![0; self.n_cols()];
        for row in &self.observed {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out
    }

    pub fn expected(&self) -> Vec<Vec<f64>> {
        let n = self.total() as f64;
        let ct = self.col_totals();
        self.row_totals()
            .iter()
            .map(|&r| ct.iter().map(|&c| r as f64 * c as f64 / n).collect())
            .collect()
    }
}

fn check_shape(ct: &ContingencyTable) -> Result<()> {
    if ct.n_rows() < 2 || ct.n_cols() < 2 {
        return Err(Error::TooSmall {
            rows: ct.n_rows(),
            cols: ct.n_cols(),
        });
    }
    for (label, total) in ct.row_labels.iter().zip(ct.row_totals()) {
        if total == 0 {
            return Err(Error::DegenerateMargin {
                axis: "row",
                label: label.clone(),
            });
        }
    }
    for (label, total) in ct.col_labels.iter().zip(ct.col_totals()) {
        if total == 0 {
            return Err(Error::DegenerateMargin {
                axis: "column",
                label: label.clone(),
            });
        }
    }
    Ok(())
}

/// Pearson's test of independence.
pub fn chi_square_test(ct: &ContingencyTable) -> Result<ChiSquareResult> {
    check_shape(ct)?;
    let expected = ct.expected();
    let mut statistic = 0.0;
    let mut min_expected = f64::INFINITY;
    for (obs_row, exp_row) in ct.observed.iter().zip(&expected) {
        for (&o, &e) in obs_row.iter().zip(exp_row) {
            let d = o as f64 - e;
            statistic += d * d / e;
            min_expected = min_expected.min(e);
        }
    }
    let df = (ct.n_rows() - 1) * (ct.n_cols() - 1);
    Ok(ChiSquareResult {
        statistic,
        df,
        p_value: chi2_sf(statistic, df as f64),
        min_expected,
        assumption_ok: min_expected >= 5.0,
    })
}

/// Labels of a column as used for cross-tabulation. Numeric columns must
/// hold integer codes.
pub fn column_labels(t: &Table, name: &str) -> Result<Vec<Option<String>>> {
    let col = t.column(name)?;
    if let Column::Numeric(v) = col {
        if v.iter().flatten().any(|x| x.fract() != 0.0) {
            return Err(Error::WrongKind {
                column: name.to_owned(),
                expected: "categorical or integer-coded",
            });
        }
    }
    Ok((0..t.n_rows()).map(|r| col.render(r)).collect())
}

pub fn contingency(t: &Table, a: &str, b: &str) -> Result<ContingencyTable> {
    let la = column_labels(t, a)?;
    let lb = column_labels(t, b)?;
    ContingencyTable::from_labels(la.into_iter(), lb.into_iter())
}

/// One entry of the bivariate report.
#[derive(Debug, Clone, Serialize)]
pub struct BivariateEntry {
    pub pair: [String; 2],
    pub crosstab: ContingencyTable,
    pub chi2: f64,
    pub df: usize,
    pub p: f64,
    pub min_expected: f64,
    pub assumption_ok: bool,
}

pub fn bivariate(t: &Table, a: &str, b: &str) -> Result<BivariateEntry> {
    let crosstab = contingency(t, a, b)?;
    let r = chi_square_test(&crosstab)?;
    Ok(BivariateEntry {
        pair: [a.to_owned(), b.to_owned()],
        crosstab,
        chi2: r.statistic,
        df: r.df,
        p: r.p_value,
        min_expected: r.min_expected,
        assumption_ok: r.assumption_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn independence_gives_zero() {
        let ct = ContingencyTable::from_matrix(vec![vec![10, 10], vec![10, 10]]).unwrap();
        let r = chi_square_test(&ct).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.df, 1);
    }

    #[test]
    fn textbook_two_by_two() {
        // expected all 25: (5²·4)/25 = 4
        let ct = ContingencyTable::from_matrix(vec![vec![30, 20], vec![20, 30]]).unwrap();
        let r = chi_square_test(&ct).unwrap();
        assert_relative_eq!(r.statistic, 4.0, max_relative = 1e-15);
        assert_relative_eq!(r.p_value, 0.045_500_263_896_358_41, max_relative = 1e-9);
    }

    #[test]
    fn degenerate_and_small() {
        let ct = ContingencyTable::from_matrix(vec![vec![0, 0], vec![3, 4]]).unwrap();
        assert!(matches!(
            chi_square_test(&ct),
            Err(Error::DegenerateMargin { axis: "row", .. })
        ));
        let one = ContingencyTable::from_matrix(vec![vec![3, 4]]).unwrap();
        assert!(matches!(chi_square_test(&one), Err(Error::TooSmall { .. })));
    }

    #[test]
    fn crosstab_sorted_labels() {
        let t = Table::new(vec![
            ("a".into(), Column::categorical_dense(["y", "x", "y", "x"])),
            ("b".into(), Column::numeric_dense([1.0, 0.0, 0.0, 0.0])),
        ])
        .unwrap();
        let ct = contingency(&t, "a", "b").unwrap();
        assert_eq!(ct.row_labels, vec!["x", "y"]);
        assert_eq!(ct.col_labels, vec!["0", "1"]);
        assert_eq!(ct.observed, vec![vec![2, 0], vec![1, 1]]);
    }

    #[test]
    fn constant_column_is_single_row() {
        let t = Table::new(vec![
            ("a".into(), Column::categorical_dense(["k", "k", "k"])),
            ("b".into(), Column::categorical_dense(["p", "q", "p"])),
        ])
        .unwrap();
        let ct = contingency(&t, "a", "b").unwrap();
        assert_eq!(ct.n_rows(), 1);
        assert!(bivariate(&t, "a", "b").is_err());
    }

    #[test]
    fn continuous_column_rejected() {
        let t = Table::new(vec![
            ("a".into(), Column::numeric_dense([0.5, 1.0])),
            ("b".into(), Column::numeric_dense([0.0, 1.0])),
        ])
        .unwrap();
        assert!(matches!(contingency(&t, "a", "b"), Err(Error::WrongKind { .. })));
    }
}
