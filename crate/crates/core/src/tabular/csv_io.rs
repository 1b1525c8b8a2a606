use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{Column, ColumnKind, Table};
use crate::error::{Error, Result};

/// Optional per-column kind overrides for [`read_csv`].
pub type SchemaHints = HashMap<String, ColumnKind>;

/// Reads a headed, comma-separated file. Without a hint, a column is numeric
/// iff every non-empty field parses as a finite decimal number. Empty fields
/// become missing. Ragged rows are rejected with their 0-based data-row index.
pub fn read_csv(path: impl AsRef<Path>, hints: Option<&SchemaHints>) -> Result<Table> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv_from_reader(file, hints).map_err(|e| match e {
        Error::Csv { message, .. } => Error::Csv {
            path: path.to_owned(),
            message,
        },
        other => other,
    })
}

pub fn read_csv_from_reader<R: Read>(reader: R, hints: Option<&SchemaHints>) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let csv_err = |e: csv::Error| Error::Csv {
        path: "<reader>".into(),
        message: e.to_string(),
    };
    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_owned)
        .collect();
    let width = header.len();
    let mut raw: Vec<Vec<Option<String>>> = vec![Vec::new(); width];
    let mut record = csv::StringRecord::new();
    let mut row = 0usize;
    while rdr.read_record(&mut record).map_err(csv_err)? {
        if record.len() != width {
            return Err(Error::RaggedRow {
                row,
                expected: width,
                found: record.len(),
            });
        }
        for (col, field) in raw.iter_mut().zip(record.iter()) {
            col.push(if field.is_empty() {
                None
            } else {
                Some(field.to_owned())
            });
        }
        row += 1;
    }

    let mut columns = Vec::with_capacity(width);
    for (name, values) in header.into_iter().zip(raw) {
        let hint = hints.and_then(|h| h.get(&name)).copied();
        let column = match hint {
            Some(ColumnKind::Categorical) => Column::categorical(values),
            Some(ColumnKind::Numeric) => {
                let parsed = values
                    .iter()
                    .map(|v| match v {
                        None => Ok(None),
                        Some(s) => parse_number(s).map(Some).ok_or_else(|| Error::WrongKind {
                            column: name.clone(),
                            expected: "numeric (schema hint)",
                        }),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Column::numeric(parsed)
            }
            None => infer(values),
        };
        columns.push((name, column));
    }
    let mut table = Table::new(columns)?;
    if table.n_cols() == 0 {
        table.n_rows = row;
    }
    Ok(table)
}

fn parse_number(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|x| x.is_finite())
}

fn infer(values: Vec<Option<String>>) -> Column {
    let parsed: Option<Vec<Option<f64>>> = values
        .iter()
        .map(|v| match v {
            None => Some(None),
            Some(s) => parse_number(s).map(Some),
        })
        .collect();
    match parsed {
        Some(nums) => Column::numeric(nums),
        None => Column::categorical(values),
    }
}

pub fn write_csv(table: &Table, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = std::io::BufWriter::new(file);
    write_csv_to_writer(table, &mut buf)?;
    buf.flush().map_err(|e| Error::io(path, e))
}

/// Missing cells are written as empty fields; numbers use the shortest
/// representation that round-trips.
pub fn write_csv_to_writer<W: Write>(table: &Table, writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(writer);
    let csv_err = |e: csv::Error| Error::Csv {
        path: "<writer>".into(),
        message: e.to_string(),
    };
    wtr.write_record(table.names()).map_err(csv_err)?;
    let mut record: Vec<String> = Vec::with_capacity(table.n_cols());
    for r in 0..table.n_rows() {
        record.clear();
        record.extend(table.columns().map(|(_, c)| c.render(r).unwrap_or_default()));
        wtr.write_record(&record).map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| Error::Csv {
        path: "<writer>".into(),
        message: e.to_string(),
    })
}
