use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chi2::{chi_square_test, ContingencyTable};
use super::entropy::mutual_information;
use crate::error::{Error, Result};
use crate::tabular::{format_number, Column, Table};

pub const SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scorer {
    Chi2,
    MutualInfo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureScore {
    pub feature: String,
    pub score: f64,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection {
    /// Top-k feature names, best first.
    pub selected: Vec<String>,
    /// Every feature, best first.
    pub ranking: Vec<FeatureScore>,
}

/// Score descending, then name ascending.
pub fn rank_order(a: &FeatureScore, b: &FeatureScore) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.feature.cmp(&b.feature))
}

/// Cross-tabulates a feature column (rows) against class codes (columns).
/// Missing feature entries are skipped.
pub fn feature_crosstab(col: &Column, y: &[u8]) -> Result<ContingencyTable> {
    if col.len() != y.len() {
        return Err(Error::Mismatch {
            left: col.len(),
            right: y.len(),
        });
    }
    let n_classes = y.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut rows: BTreeMap<RowKey, Vec<u64>> = BTreeMap::new();
    for (r, &c) in y.iter().enumerate() {
        let key = match col {
            Column::Numeric(v) => match v[r] {
                Some(x) => RowKey::Num(OrdF64(if x == 0.0 { 0.0 } else { x })),
                None => continue,
            },
            Column::Categorical(cat) => match cat.codes()[r] {
                Some(code) => RowKey::Cat(code),
                None => continue,
            },
        };
        rows.entry(key).or_insert_with(|| vec![0; n_classes])[c as usize] += 1;
    }
    let label = |k: &RowKey| match (k, col) {
        (RowKey::Num(x), _) => format_number(x.0),
        (RowKey::Cat(code), Column::Categorical(cat)) => cat.categories()[*code as usize].clone(),
        (RowKey::Cat(_), Column::Numeric(_)) => unreachable!("numeric keys only"),
    };
    let row_labels = rows.keys().map(label).collect();
    let observed: Vec<Vec<u64>> = rows.into_values().collect();
    // drop classes absent from y so the table has no empty column
    let present: Vec<usize> = (0..n_classes)
        .filter(|&c| observed.iter().any(|r| r[c] > 0))
        .collect();
    ContingencyTable::from_counts(
        row_labels,
        present.iter().map(|c| c.to_string()).collect(),
        observed
            .into_iter()
            .map(|r| present.iter().map(|&c| r[c]).collect())
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum RowKey {
    Num(OrdF64),
    Cat(u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Chi-squared score and p-value; a table with a single row or column (a
/// constant feature, say) carries no evidence and scores 0 with p = 1.
pub fn chi2_score(ct: &ContingencyTable) -> Result<(f64, f64)> {
    if ct.n_rows() < 2 || ct.n_cols() < 2 {
        return Ok((0.0, 1.0));
    }
    let r = chi_square_test(ct)?;
    Ok((r.statistic, r.p_value))
}

fn score_feature(name: &str, col: &Column, y: &[u8], scorer: Scorer) -> Result<FeatureScore> {
    if scorer == Scorer::Chi2 {
        if let Column::Numeric(v) = col {
            if let Some(x) = v.iter().flatten().find(|x| **x < 0.0) {
                return Err(Error::OutOfBounds {
                    what: "chi2 feature value",
                    detail: format!("`{name}` holds negative value {x}"),
                });
            }
        }
    }
    let ct = feature_crosstab(col, y)?;
    Ok(match scorer {
        Scorer::Chi2 => {
            let (score, p) = chi2_score(&ct)?;
            FeatureScore {
                feature: name.to_owned(),
                score,
                p_value: Some(p),
            }
        }
        Scorer::MutualInfo => FeatureScore {
            feature: name.to_owned(),
            score: mutual_information(&ct),
            p_value: None,
        },
    })
}

/// Ranks every column of `x` against `y` and keeps the best `k`.
pub fn select_k_best(x: &Table, y: &[u8], scorer: Scorer, k: usize) -> Result<Selection> {
    if k == 0 || k > x.n_cols() {
        return Err(Error::OutOfBounds {
            what: "k",
            detail: format!("{k} not in 1..={}", x.n_cols()),
        });
    }
    let cols: Vec<(&str, &Column)> = x.columns().collect();
    let mut ranking = cols
        .par_iter()
        .map(|(name, col)| score_feature(name, col, y, scorer))
        .collect::<Result<Vec<_>>>()?;
    ranking.sort_by(rank_order);
    let selected = ranking[..k].iter().map(|s| s.feature.clone()).collect();
    Ok(Selection { selected, ranking })
}

/// Chi-squared association of each feature with the multiclass target and
/// with each one-vs-rest binarization of it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssociationMatrix {
    pub features: Vec<String>,
    pub columns: Vec<String>,
    pub chi2: Vec<Vec<f64>>,
    pub p_raw: Vec<Vec<f64>>,
}

pub fn mask_p(p: f64) -> f64 {
    if p >= SIGNIFICANCE {
        1.0
    } else {
        p
    }
}

impl AssociationMatrix {
    pub fn p_masked(&self) -> Vec<Vec<f64>> {
        self.p_raw
            .iter()
            .map(|r| r.iter().map(|&p| mask_p(p)).collect())
            .collect()
    }

    /// Features with p below the significance level in column `j`.
    pub fn count_associated(&self, j: usize) -> usize {
        self.p_raw.iter().filter(|r| r[j] < SIGNIFICANCE).count()
    }

    pub fn counts(&self) -> Vec<usize> {
        (0..self.columns.len()).map(|j| self.count_associated(j)).collect()
    }

    fn csv(&self, cells: &[Vec<f64>]) -> String {
        let mut out = String::from("feature");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (f, row) in self.features.iter().zip(cells) {
            out.push_str(&csv_field(f));
            for v in row {
                let _ = write!(out, ",{}", format_number(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn chi2_csv(&self) -> String {
        self.csv(&self.chi2)
    }

    pub fn p_masked_csv(&self) -> String {
        self.csv(&self.p_masked())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "features": self.features,
            "columns": self.columns,
            "chi2": self.chi2,
            "p_value": self.p_masked(),
            "p_raw": self.p_raw,
            "associated_counts": self.counts(),
        })
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub fn class_association_matrix(x: &Table, y: &[u8], n_classes: usize) -> Result<AssociationMatrix> {
    if let Some(&bad) = y.iter().find(|&&c| c as usize >= n_classes) {
        return Err(Error::OutOfBounds {
            what: "class code",
            detail: format!("{bad} with {n_classes} classes"),
        });
    }
    let binarized: Vec<Vec<u8>> = (0..n_classes)
        .map(|c| y.iter().map(|&v| u8::from(v as usize == c)).collect())
        .collect();
    let cols: Vec<(&str, &Column)> = x.columns().collect();
    let rows = cols
        .par_iter()
        .map(|(name, col)| {
            let mut chi = Vec::with_capacity(n_classes + 1);
            let mut ps = Vec::with_capacity(n_classes + 1);
            for target in std::iter::once(y).chain(binarized.iter().map(Vec::as_slice)) {
                let s = score_feature(name, col, target, Scorer::Chi2)?;
                chi.push(s.score);
                ps.push(s.p_value.unwrap_or(1.0));
            }
            Ok((chi, ps))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut columns = vec!["Mortality".to_owned()];
    columns.extend((1..=n_classes).map(|c| format!("Class{c}")));
    let (chi2, p_raw) = rows.into_iter().unzip();
    Ok(AssociationMatrix {
        features: x.names().to_vec(),
        columns,
        chi2,
        p_raw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (Table, Vec<u8>) {
        let y: Vec<u8> = (0..60).map(|i| (i % 3) as u8).collect();
        let f1: Vec<f64> = y.iter().map(|&c| f64::from(c == 0)).collect();
        let f2: Vec<f64> = (0..60).map(|i| f64::from((i * 7 / 5) % 2 == 0)).collect();
        let f3 = vec![1.0; 60];
        let t = Table::new(vec![
            ("f1".into(), Column::numeric_dense(f1)),
            ("f2".into(), Column::numeric_dense(f2)),
            ("f3".into(), Column::numeric_dense(f3)),
        ])
        .unwrap();
        (t, y)
    }

    #[test]
    fn perfect_feature_wins() {
        let (t, y) = toy();
        let sel = select_k_best(&t, &y, Scorer::Chi2, 1).unwrap();
        assert_eq!(sel.selected, vec!["f1"]);
        let f3 = sel.ranking.iter().find(|s| s.feature == "f3").unwrap();
        assert_eq!((f3.score, f3.p_value), (0.0, Some(1.0)));
        let mi = select_k_best(&t, &y, Scorer::MutualInfo, 1).unwrap();
        assert_eq!(mi.selected, vec!["f1"]);
    }

    #[test]
    fn k_bounds() {
        let (t, y) = toy();
        assert!(select_k_best(&t, &y, Scorer::Chi2, 0).is_err());
        assert!(select_k_best(&t, &y, Scorer::Chi2, 4).is_err());
        assert_eq!(select_k_best(&t, &y, Scorer::Chi2, 3).unwrap().selected.len(), 3);
    }

    #[test]
    fn tie_break_by_name() {
        let y = vec![0u8, 1, 0, 1];
        let t = Table::new(vec![
            ("b".into(), Column::numeric_dense([1.0, 0.0, 1.0, 0.0])),
            ("a".into(), Column::numeric_dense([1.0, 0.0, 1.0, 0.0])),
        ])
        .unwrap();
        let sel = select_k_best(&t, &y, Scorer::Chi2, 2).unwrap();
        assert_eq!(sel.selected, vec!["a", "b"]);
    }

    #[test]
    fn negative_rejected_for_chi2() {
        let t = Table::new(vec![("a".into(), Column::numeric_dense([-1.0, 0.0]))]).unwrap();
        assert!(select_k_best(&t, &[0, 1], Scorer::Chi2, 1).is_err());
        assert!(select_k_best(&t, &[0, 1], Scorer::MutualInfo, 1).is_ok());
    }

    #[test]
    fn association_masks_constant() {
        let (t, y) = toy();
        let m = class_association_matrix(&t, &y, 3).unwrap();
        assert_eq!(m.columns, vec!["Mortality", "Class1", "Class2", "Class3"]);
        let f3 = m.features.iter().position(|f| f == "f3").unwrap();
        assert!(m.p_masked()[f3].iter().all(|&p| p == 1.0));
        let f1 = m.features.iter().position(|f| f == "f1").unwrap();
        assert!(m.p_masked()[f1][0] < SIGNIFICANCE && m.p_masked()[f1][1] < SIGNIFICANCE);
        // cells agree with direct tests
        let col = t.column("f1").unwrap();
        let bin: Vec<u8> = y.iter().map(|&c| u8::from(c == 1)).collect();
        let direct = chi_square_test(&feature_crosstab(col, &bin).unwrap()).unwrap();
        assert_eq!(m.chi2[f1][2], direct.statistic);
        assert!(m.chi2_csv().starts_with("feature,Mortality,Class1,Class2,Class3\nf1,"));
    }

    #[test]
    fn mask_threshold() {
        assert_eq!(mask_p(0.05), 1.0);
        assert_eq!(mask_p(0.049), 0.049);
    }
}
