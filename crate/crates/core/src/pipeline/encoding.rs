use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tabular::{Column, Table};

/// Which categorical columns to expand into indicators, and which of the
/// generated `<column>_<category>` indicators to discard (the reference
/// level of each source, typically).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DummyPlan {
    pub columns: Vec<String>,
    #[serde(default)]
    pub drop: Vec<String>,
}

pub fn dummy_name(column: &str, category: &str) -> String {
    format!("{column}_{category}")
}

/// Expands every plan column into 0/1 indicators named `<column>_<category>`,
/// removes the drop list and the sources. Untouched columns keep their order
/// and come first; indicators follow, grouped by source in table order with
/// categories sorted lexicographically. Missing entries get all zeros.
pub fn dummy_encode(t: &Table, plan: &DummyPlan) -> Result<Table> {
    let in_plan: HashSet<&str> = plan.columns.iter().map(String::as_str).collect();
    for c in &plan.columns {
        t.column(c)?
            .as_categorical()
            .ok_or_else(|| Error::WrongKind {
                column: c.clone(),
                expected: "categorical",
            })?;
    }

    let mut out: Vec<(String, Column)> = t
        .columns()
        .filter(|(n, _)| !in_plan.contains(n))
        .map(|(n, c)| (n.to_owned(), c.clone()))
        .collect();
    let mut generated = Vec::new();
    for (name, col) in t.columns().filter(|(n, _)| in_plan.contains(n)) {
        let cat = col.as_categorical().expect("checked above");
        for (k, category) in cat.categories().iter().enumerate() {
            let values = cat
                .codes()
                .iter()
                .map(|code| if *code == Some(k as u32) { 1.0 } else { 0.0 });
            generated.push((dummy_name(name, category), Column::numeric_dense(values)));
        }
    }

    let names: HashSet<&str> = generated.iter().map(|(n, _)| n.as_str()).collect();
    if let Some(missing) = plan.drop.iter().find(|d| !names.contains(d.as_str())) {
        return Err(Error::UnknownDummy(missing.clone()));
    }
    let drop: HashSet<&str> = plan.drop.iter().map(String::as_str).collect();
    out.extend(generated.into_iter().filter(|(n, _)| !drop.contains(n.as_str())));
    if out.is_empty() {
        // keeps the row count
        return t.project(&[]);
    }
    Table::new(out)
}
