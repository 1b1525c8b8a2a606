use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::{Column, Table};
use crate::error::{Error, Result};

impl Table {
    /// Collapses rows identical across every column to their last occurrence,
    /// keeping survivors in their original relative order.
    pub fn deduplicate_keep_last(&self) -> Table {
        let mut last: HashMap<Vec<u64>, usize> = HashMap::with_capacity(self.n_rows);
        let mut keys = Vec::with_capacity(self.n_rows);
        for r in 0..self.n_rows {
            let key: Vec<u64> = self.columns.iter().map(|c| c.row_key(r)).collect();
            last.insert(key.clone(), r);
            keys.push(key);
        }
        let keep: Vec<usize> = keys
            .iter()
            .enumerate()
            .filter(|(r, k)| last[*k] == *r)
            .map(|(r, _)| r)
            .collect();
        if keep.len() == self.n_rows {
            return self.clone();
        }
        self.select_rows(&keep)
    }

    pub fn missing_summary(&self) -> MissingSummary {
        MissingSummary {
            entries: self
                .columns()
                .map(|(name, col)| MissingEntry {
                    column: name.to_owned(),
                    total: self.n_rows,
                    missing: col.missing_count(),
                })
                .collect(),
        }
    }

    pub fn drop_columns<S: AsRef<str>>(&self, names: &[S]) -> Result<Table> {
        for n in names {
            if !self.has_column(n.as_ref()) {
                return Err(Error::UnknownColumn(n.as_ref().to_owned()));
            }
        }
        let keep: Vec<String> = self
            .names
            .iter()
            .filter(|n| !names.iter().any(|d| d.as_ref() == n.as_str()))
            .cloned()
            .collect();
        self.project(&keep)
    }

    /// Replaces missing entries of categorical columns with `label`.
    pub fn fill_missing_with_label<S: AsRef<str>>(&self, columns: &[S], label: &str) -> Result<Table> {
        let mut out = self.clone();
        for name in columns {
            let name = name.as_ref();
            let cat = self
                .column(name)?
                .as_categorical()
                .ok_or_else(|| Error::WrongKind {
                    column: name.to_owned(),
                    expected: "categorical (bin numeric columns first)",
                })?;
            if !cat.codes().iter().any(Option::is_none) {
                continue;
            }
            let filled = Column::categorical(cat.iter().map(|v| Some(v.unwrap_or(label))));
            out = out.with_column(name, filled)?;
        }
        Ok(out)
    }

    /// Rewrites every non-missing value of `column` through `mapping`
    /// (keyed by the rendered value); the result is categorical.
    pub fn decode_values(&self, column: &str, mapping: &BTreeMap<String, String>) -> Result<Table> {
        let col = self.column(column)?;
        let mut decoded = Vec::with_capacity(self.n_rows);
        for r in 0..self.n_rows {
            match col.render(r) {
                None => decoded.push(None),
                Some(v) => match mapping.get(&v) {
                    Some(m) => decoded.push(Some(m.clone())),
                    None => {
                        return Err(Error::UnmappedValue {
                            column: column.to_owned(),
                            value: v,
                        })
                    }
                },
            }
        }
        self.with_column(column, Column::categorical(decoded))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingEntry {
    pub column: String,
    pub total: usize,
    pub missing: usize,
}

impl MissingEntry {
    pub fn pct_missing(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.missing as f64 / self.total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingSummary {
    pub entries: Vec<MissingEntry>,
}

#[derive(Serialize)]
struct EntryJson {
    total: usize,
    missing: usize,
    pct: f64,
}

impl MissingSummary {
    pub fn get(&self, column: &str) -> Option<&MissingEntry> {
        self.entries.iter().find(|e| e.column == column)
    }

    /// `{"column": {"total": n, "missing": m, "pct": x}}`, pct rounded to two
    /// decimals.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for e in &self.entries {
            let v = EntryJson {
                total: e.total,
                missing: e.missing,
                pct: round_to(e.pct_missing(), 2),
            };
            map.insert(
                e.column.clone(),
                serde_json::to_value(v).expect("plain struct serializes"),
            );
        }
        serde_json::Value::Object(map)
    }
}

pub(crate) fn round_to(x: f64, decimals: i32) -> f64 {
    let f = 10f64.powi(decimals);
    (x * f).round() / f
}
