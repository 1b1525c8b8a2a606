use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Categorical,
    Numeric,
}

/// Dictionary-encoded string column. `categories` is sorted and holds exactly
/// the distinct non-missing values present.
#[derive(Debug, Clone, PartialEq)]
pub struct Categorical {
    categories: Vec<String>,
    codes: Vec<Option<u32>>,
}

impl Categorical {
    pub fn from_values<I, S>(values: I) -> Self
    where
        I: IntoIterator<Item = Option<S>>,
        S: Into<String>,
    {
        let raw: Vec<Option<String>> = values.into_iter().map(|v| v.map(Into::into)).collect();
        let categories: Vec<String> = raw
            .iter()
            .flatten()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let codes = raw
            .iter()
            .map(|v| {
                v.as_ref().map(|s| {
                    categories
                        .binary_search(s)
                        .expect("category collected above") as u32
                })
            })
            .collect();
        Categorical { categories, codes }
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn codes(&self) -> &[Option<u32>] {
        &self.codes
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn get(&self, row: usize) -> Option<&str> {
        self.codes[row].map(|c| self.categories[c as usize].as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = Option<&str>> + '_ {
        self.codes
            .iter()
            .map(|c| c.map(|c| self.categories[c as usize].as_str()))
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Categorical::from_values(rows.iter().map(|&r| self.get(r)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<Option<f64>>),
    Categorical(Categorical),
}

impl Column {
    /// Numeric column; NaN entries are stored as missing.
    pub fn numeric<I: IntoIterator<Item = Option<f64>>>(values: I) -> Self {
        Column::Numeric(
            values
                .into_iter()
                .map(|v| v.filter(|x| !x.is_nan()))
                .collect(),
        )
    }

    pub fn numeric_dense<I: IntoIterator<Item = f64>>(values: I) -> Self {
        Column::numeric(values.into_iter().map(Some))
    }

    pub fn categorical<I, S>(values: I) -> Self
    where
        I: IntoIterator<Item = Option<S>>,
        S: Into<String>,
    {
        Column::Categorical(Categorical::from_values(values))
    }

    pub fn categorical_dense<I, S>(values: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Column::categorical(values.into_iter().map(Some))
    }

    pub fn kind(&self) -> ColumnKind {
        match self {
            Column::Numeric(_) => ColumnKind::Numeric,
            Column::Categorical(_) => ColumnKind::Categorical,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_missing(&self, row: usize) -> bool {
        match self {
            Column::Numeric(v) => v[row].is_none(),
            Column::Categorical(c) => c.codes[row].is_none(),
        }
    }

    pub fn missing_count(&self) -> usize {
        (0..self.len()).filter(|&r| self.is_missing(r)).count()
    }

    /// Cell rendered the way it is written to CSV; `None` for missing.
    pub fn render(&self, row: usize) -> Option<String> {
        match self {
            Column::Numeric(v) => v[row].map(format_number),
            Column::Categorical(c) => c.get(row).map(str::to_owned),
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        match self {
            Column::Numeric(v) => Column::Numeric(rows.iter().map(|&r| v[r]).collect()),
            Column::Categorical(c) => Column::Categorical(c.select_rows(rows)),
        }
    }

    pub fn as_numeric(&self) -> Option<&[Option<f64>]> {
        match self {
            Column::Numeric(v) => Some(v),
            Column::Categorical(_) => None,
        }
    }

    pub fn as_categorical(&self) -> Option<&Categorical> {
        match self {
            Column::Categorical(c) => Some(c),
            Column::Numeric(_) => None,
        }
    }

    /// Per-row 64-bit key used for whole-row equality. Missing compares equal
    /// to missing.
    pub(crate) fn row_key(&self, row: usize) -> u64 {
        match self {
            Column::Numeric(v) => match v[row] {
                None => u64::MAX,
                // -0.0 and 0.0 compare equal
                Some(x) if x == 0.0 => 0,
                Some(x) => x.to_bits(),
            },
            Column::Categorical(c) => c.codes[row].map_or(u64::MAX, u64::from),
        }
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_number(x: f64) -> String {
    format!("{x}")
}
