use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tabular::{Column, Table};

/// Interval edges and labels for discretizing one numeric column.
///
/// Intervals are left-open, right-closed: `edges[i] < v <= edges[i+1]` maps
/// to `labels[i]`. With `include_lowest` the first interval also takes
/// `v == edges[0]`. Edges may be infinite; JSON uses `"-inf"` / `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinningSpec {
    pub variable: String,
    pub new_name: String,
    #[serde(with = "edge_serde")]
    pub edges: Vec<f64>,
    pub labels: Vec<String>,
    #[serde(default)]
    pub include_lowest: bool,
}

impl BinningSpec {
    pub fn new(
        variable: &str,
        new_name: &str,
        edges: &[f64],
        labels: &[&str],
        include_lowest: bool,
    ) -> Result<Self> {
        let spec = BinningSpec {
            variable: variable.to_owned(),
            new_name: new_name.to_owned(),
            edges: edges.to_vec(),
            labels: labels.iter().map(|s| (*s).to_owned()).collect(),
            include_lowest,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: String| Error::InvalidBinning {
            variable: self.variable.clone(),
            reason,
        };
        if self.edges.len() < 2 {
            return Err(invalid("need at least two edges".into()));
        }
        if self.edges.iter().any(|e| e.is_nan()) {
            return Err(invalid("NaN edge".into()));
        }
        if self.edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("edges must be strictly increasing".into()));
        }
        if self.labels.len() != self.edges.len() - 1 {
            return Err(invalid(format!(
                "{} labels for {} intervals",
                self.labels.len(),
                self.edges.len() - 1
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = self.labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(invalid(format!("duplicate label `{dup}`")));
        }
        Ok(())
    }

    /// Index of the interval holding `v`, if any.
    pub fn bin_index(&self, v: f64) -> Option<usize> {
        let first = self.edges[0];
        if self.include_lowest && v == first {
            return Some(0);
        }
        // first i with v <= edges[i+1], given v > edges[0]
        if v <= first || v.is_nan() {
            return None;
        }
        self.edges[1..].iter().position(|&hi| v <= hi)
    }

    pub fn label_for(&self, v: f64) -> Option<&str> {
        self.bin_index(v).map(|i| self.labels[i].as_str())
    }
}

/// Replaces the numeric `spec.variable` by a categorical `spec.new_name`
/// appended at the end. Missing stays missing.
pub fn bin_column(t: &Table, spec: &BinningSpec) -> Result<Table> {
    spec.validate()?;
    let values = t
        .column(&spec.variable)?
        .as_numeric()
        .ok_or_else(|| Error::WrongKind {
            column: spec.variable.clone(),
            expected: "numeric",
        })?;
    let labels = values
        .iter()
        .map(|v| match v {
            None => Ok(None),
            Some(x) => spec.label_for(*x).map(Some).ok_or(Error::OutOfRange {
                column: spec.variable.clone(),
                value: *x,
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    t.drop_columns(&[spec.variable.as_str()])?
        .with_column(&spec.new_name, Column::categorical(labels))
}

pub(crate) mod edge_serde {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Edge {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(edges: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let out: Vec<Edge> = edges
            .iter()
            .map(|&e| {
                if e == f64::INFINITY {
                    Edge::Text("inf".into())
                } else if e == f64::NEG_INFINITY {
                    Edge::Text("-inf".into())
                } else {
                    Edge::Num(e)
                }
            })
            .collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Edge>::deserialize(d)?
            .into_iter()
            .map(|e| match e {
                Edge::Num(x) => Ok(x),
                Edge::Text(t) => match t.as_str() {
                    "inf" | "+inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    other => Err(D::Error::custom(format!("bad edge `{other}`"))),
                },
            })
            .collect()
    }
}
