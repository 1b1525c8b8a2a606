//! Column-oriented tables, CSV ingestion/export and the cleaning passes that
//! run before any modelling: duplicate removal, missing-value accounting,
//! column drops, missing-label fill and value decoding.
//!
//! Tables are immutable values. Every operation borrows its input and returns
//! a fresh table, so a table can be shared across threads freely.

mod clean;
mod column;
mod csv_io;

use std::collections::HashMap;

pub use clean::{MissingEntry, MissingSummary};
pub use column::{format_number, Categorical, Column, ColumnKind};
pub use csv_io::{read_csv, read_csv_from_reader, write_csv, write_csv_to_writer, SchemaHints};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    names: Vec<String>,
    columns: Vec<Column>,
    n_rows: usize,
}

impl Table {
    /// Builds a table, checking name uniqueness and equal column lengths.
    /// An empty column list yields a zero-row table.
    pub fn new(columns: Vec<(String, Column)>) -> Result<Self> {
        let n_rows = columns.first().map_or(0, |(_, c)| c.len());
        let mut seen = HashMap::with_capacity(columns.len());
        let mut names = Vec::with_capacity(columns.len());
        let mut cols = Vec::with_capacity(columns.len());
        for (name, col) in columns {
            if col.len() != n_rows {
                return Err(Error::LengthMismatch {
                    column: name,
                    expected: n_rows,
                    found: col.len(),
                });
            }
            if seen.insert(name.clone(), ()).is_some() {
                return Err(Error::DuplicateColumn(name));
            }
            names.push(name);
            cols.push(col);
        }
        Ok(Table {
            names,
            columns: cols,
            n_rows,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> impl Iterator<Item = (&str, &Column)> {
        self.names.iter().map(String::as_str).zip(self.columns.iter())
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.position(name).is_some()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.position(name)
            .map(|i| &self.columns[i])
            .ok_or_else(|| Error::UnknownColumn(name.to_owned()))
    }

    pub fn select_rows(&self, rows: &[usize]) -> Table {
        Table {
            names: self.names.clone(),
            columns: self.columns.iter().map(|c| c.select_rows(rows)).collect(),
            n_rows: rows.len(),
        }
    }

    /// Returns a copy with `name` appended (or replaced in place if it exists).
    pub fn with_column(&self, name: &str, column: Column) -> Result<Table> {
        if !self.columns.is_empty() && column.len() != self.n_rows {
            return Err(Error::LengthMismatch {
                column: name.to_owned(),
                expected: self.n_rows,
                found: column.len(),
            });
        }
        let mut out = self.clone();
        if out.columns.is_empty() {
            out.n_rows = column.len();
        }
        match out.position(name) {
            Some(i) => out.columns[i] = column,
            None => {
                out.names.push(name.to_owned());
                out.columns.push(column);
            }
        }
        Ok(out)
    }

    /// Keeps only the listed columns, in the listed order.
    pub fn project(&self, names: &[String]) -> Result<Table> {
        let cols = names
            .iter()
            .map(|n| Ok((n.clone(), self.column(n)?.clone())))
            .collect::<Result<Vec<_>>>()?;
        let mut t = Table::new(cols)?;
        if t.columns.is_empty() {
            t.n_rows = self.n_rows;
        }
        Ok(t)
    }

    /// Rendered row, for diagnostics and tests.
    pub fn row(&self, row: usize) -> Vec<Option<String>> {
        self.columns.iter().map(|c| c.render(row)).collect()
    }
}
