use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tabular::{Column, Table};

pub const TARGET: &str = "Mortality";
pub const DEATH_5: &str = "DEATH_5";
pub const DEATH_10: &str = "DEATH_10";

/// Remaining-life band: up to 5 years, 5 to 10 years, beyond 10 years.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MortalityClass {
    Class1,
    Class2,
    Class3,
}

impl MortalityClass {
    pub const ALL: [MortalityClass; 3] = [Self::Class1, Self::Class2, Self::Class3];

    pub fn code(self) -> u8 {
        match self {
            Self::Class1 => 0,
            Self::Class2 => 1,
            Self::Class3 => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Class1 => "Class 1",
            Self::Class2 => "Class 2",
            Self::Class3 => "Class 3",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.label() == label)
    }
}

impl fmt::Display for MortalityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Fuses the 5- and 10-year death flags. (1, 0) cannot happen: a patient dead
/// at five years is not alive at ten. `row` is only used in the error.
pub fn derive_mortality(death_5: u8, death_10: u8, row: usize) -> Result<MortalityClass> {
    match (death_5, death_10) {
        (1, 1) => Ok(MortalityClass::Class1),
        (0, 1) => Ok(MortalityClass::Class2),
        (0, 0) => Ok(MortalityClass::Class3),
        (1, 0) => Err(Error::ImpossibleMortality { row }),
        (a, b) => Err(Error::NotBinary {
            row,
            column: if a > 1 { DEATH_5 } else { DEATH_10 }.to_owned(),
            value: if a > 1 { a } else { b }.to_string(),
        }),
    }
}

fn binary_at(col: &Column, name: &str, row: usize) -> Result<u8> {
    let rendered = col.render(row);
    match rendered.as_deref() {
        Some("0") => Ok(0),
        Some("1") => Ok(1),
        other => Err(Error::NotBinary {
            row,
            column: name.to_owned(),
            value: other.unwrap_or("<missing>").to_owned(),
        }),
    }
}

/// Adds the categorical `Mortality` column and drops both death flags.
pub fn derive_mortality_column(t: &Table) -> Result<Table> {
    let d5 = t.column(DEATH_5)?;
    let d10 = t.column(DEATH_10)?;
    let labels = (0..t.n_rows())
        .map(|r| {
            let class = derive_mortality(binary_at(d5, DEATH_5, r)?, binary_at(d10, DEATH_10, r)?, r)?;
            Ok(class.label())
        })
        .collect::<Result<Vec<_>>>()?;
    t.drop_columns(&[DEATH_5, DEATH_10])?
        .with_column(TARGET, Column::categorical_dense(labels))
}

/// Maps `Class 1/2/3` to numeric codes 0/1/2. A column that is already
/// numeric is rejected so a second pass cannot corrupt the codes.
pub fn label_encode_target(t: &Table) -> Result<Table> {
    let col = t.column(TARGET)?;
    let cat = match col {
        Column::Numeric(_) => return Err(Error::AlreadyEncoded(TARGET.to_owned())),
        Column::Categorical(c) => c,
    };
    let codes = cat
        .iter()
        .map(|v| match v {
            None => Ok(None),
            Some(label) => MortalityClass::from_label(label)
                .map(|c| Some(f64::from(c.code())))
                .ok_or_else(|| Error::UnknownLabel {
                    column: TARGET.to_owned(),
                    label: label.to_owned(),
                }),
        })
        .collect::<Result<Vec<_>>>()?;
    t.with_column(TARGET, Column::numeric(codes))
}

/// Reads the encoded target as class codes.
pub fn target_codes(t: &Table, column: &str) -> Result<Vec<u8>> {
    let col = t.column(column)?;
    (0..t.n_rows())
        .map(|r| {
            let v = col.render(r);
            match v.as_deref() {
                Some("0") => Ok(0),
                Some("1") => Ok(1),
                Some("2") => Ok(2),
                Some(label) => MortalityClass::from_label(label)
                    .map(MortalityClass::code)
                    .ok_or_else(|| Error::UnknownLabel {
                        column: column.to_owned(),
                        label: label.to_owned(),
                    }),
                None => Err(Error::UnknownLabel {
                    column: column.to_owned(),
                    label: "<missing>".to_owned(),
                }),
            }
        })
        .collect()
}
