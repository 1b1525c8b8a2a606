//! Turns the raw cohort table into model-ready data: target fusion, sparse
//! column removal, binning, missing labels, decoding, then indicator and
//! target encoding.

pub mod binning;
pub mod encoding;
pub mod mortality;
pub mod presets;

use serde::Serialize;

pub use binning::{bin_column, BinningSpec};
pub use encoding::{dummy_encode, dummy_name, DummyPlan};
pub use mortality::{
    derive_mortality, derive_mortality_column, label_encode_target, target_codes,
    MortalityClass, TARGET,
};
pub use presets::{Decode, Preset};

use crate::error::Result;
use crate::tabular::{MissingSummary, Table};

/// Row and class counts recorded while preparing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrepareCounts {
    pub raw_rows: usize,
    pub raw_columns: usize,
    pub duplicates_removed: usize,
    pub deduped_rows: usize,
    pub class_counts_raw: [usize; 3],
    pub class_counts: [usize; 3],
    pub output_columns: usize,
}

#[derive(Debug, Clone)]
pub struct Prepared {
    pub table: Table,
    pub counts: PrepareCounts,
    /// Missing values of the deduplicated table before any transformation.
    pub missing: MissingSummary,
}

pub fn class_counts(t: &Table) -> Result<[usize; 3]> {
    let mut counts = [0; 3];
    for c in target_codes(t, TARGET)? {
        counts[c as usize] += 1;
    }
    Ok(counts)
}

/// dedup, target fusion, sparse drop, binning, missing fill, decoding.
pub fn prepare(raw: &Table, preset: &Preset) -> Result<Prepared> {
    let class_counts_raw = derive_mortality_column(raw)
        .and_then(|t| class_counts(&t))
        .map_err(|e| e.in_stage("target fusion"))?;
    let deduped = raw.deduplicate_keep_last();
    let missing = deduped.missing_summary();
    let mut t = derive_mortality_column(&deduped).map_err(|e| e.in_stage("target fusion"))?;
    let class_counts = class_counts(&t)?;
    t = t
        .drop_columns(&preset.drop_sparse)
        .map_err(|e| e.in_stage("sparse column drop"))?;
    for spec in &preset.binning {
        t = bin_column(&t, spec).map_err(|e| e.in_stage("binning"))?;
    }
    t = t
        .fill_missing_with_label(&preset.fill_missing, &preset.missing_label)
        .map_err(|e| e.in_stage("missing-label fill"))?;
    for d in &preset.decode {
        t = t
            .decode_values(&d.column, &d.mapping)
            .map_err(|e| e.in_stage("decoding"))?;
    }
    let counts = PrepareCounts {
        raw_rows: raw.n_rows(),
        raw_columns: raw.n_cols(),
        duplicates_removed: raw.n_rows() - deduped.n_rows(),
        deduped_rows: deduped.n_rows(),
        class_counts_raw,
        class_counts,
        output_columns: t.n_cols(),
    };
    Ok(Prepared {
        table: t,
        counts,
        missing,
    })
}

/// Drops the rejected columns, expands indicators and label-encodes the
/// target, which is moved to the last position.
pub fn encode(t: &Table, preset: &Preset) -> Result<Table> {
    let t = t
        .drop_columns(&preset.drop_before_encoding)
        .map_err(|e| e.in_stage("bivariate drop"))?;
    let t = dummy_encode(&t, &preset.dummy_plan).map_err(|e| e.in_stage("dummy encoding"))?;
    let t = label_encode_target(&t).map_err(|e| e.in_stage("label encoding"))?;
    let mut order: Vec<String> = t.names().iter().filter(|n| *n != TARGET).cloned().collect();
    order.push(TARGET.to_owned());
    t.project(&order)
}
