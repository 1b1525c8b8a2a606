//! Synthetic raw cohorts with the veterans-T2DM column layout, for tests,
//! demos and determinism checks. Values are drawn so that every binning
//! category and every dummy reference level occurs, the fill-listed
//! biomarkers have missing entries, a few rows are exact duplicates, and
//! the mortality band depends on age, frailty and a handful of conditions.

use rand::Rng as _;

use crate::error::Result;
use crate::pipeline::presets::veterans_t2dm;
use crate::pipeline::mortality::{DEATH_10, DEATH_5};
use crate::pipeline::BinningSpec;
use crate::sampling::{rng, Rng};
use crate::tabular::{Column, Table};

pub const MEDICATIONS: [&str; 7] = ["ALPHA", "BIGUAN", "INSULIN", "SULF", "TZD", "BP_RX", "OTHER_MED"];

pub const COMORBIDITIES: [&str; 43] = [
    "AMI", "HIV", "ALCOHOL", "ABI", "BLOODLOSS", "ARRHYTHMIA", "PULMONARY", "COAG", "CHF", "CAD",
    "CABG", "ANEMIA", "DEPRESSION", "DMCX", "FEET", "DRUGS", "ESLD", "FLUIDSLYTES", "HYPERG",
    "HTNCX", "HTN", "HYPOTHYROID", "LIVER", "AMPUTATION", "LYMPHOMA", "METS", "OBESITY",
    "NEUROOTHER", "PARALYSIS", "PUD", "PCI", "PVD", "PSYCHOSES", "PHTN", "RENAL", "RETINOPATHY",
    "RETSSCREEN", "RHEUMATIC", "SEVERE_DEP", "SMOKER", "TUMOR", "VALVULAR", "WEIGHTLOSS",
];

pub const MARITAL: [&str; 3] = ["MARRIED", "SINGLE", "WIDOWED"];

pub const PRIORITY: [&str; 9] = [
    "GROUP 1", "GROUP 2", "GROUP 3", "GROUP 4", "GROUP 5", "GROUP 6", "GROUP 7", "GROUP 8", "Unknown",
];

/// (variable, plausible low, plausible high, decimals, missing rate)
const MEASURES: [(&str, f64, f64, i32, f64); 14] = [
    ("AGE", 65.0, 99.0, 0, 0.0),
    ("BMI", 12.0, 60.0, 1, 0.0),
    ("DIASTOLIC", 45.0, 110.0, 0, 0.0),
    ("SYSTOLIC", 90.0, 210.0, 0, 0.0),
    ("HDL", 20.0, 95.0, 1, 0.03),
    ("LDL", 40.0, 240.0, 1, 0.06),
    ("A1C", 4.5, 13.0, 1, 0.0),
    ("TRI", 50.0, 400.0, 1, 0.03),
    ("MICROALB", 0.5, 300.0, 1, 0.74),
    ("SERUMALB", 2.0, 5.0, 2, 0.30),
    ("SERUMCRE", 0.5, 6.0, 2, 0.05),
    ("FRAILITY", 0.0, 0.6, 3, 0.0),
    ("N_IP", 0.0, 40.0, 0, 0.0),
    ("N_OP", 0.0, 80.0, 0, 0.0),
];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_rows: usize,
    pub seed: u64,
    /// Share of rows that repeat an earlier row verbatim.
    pub duplicate_fraction: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_rows: 500,
            seed: 0,
            duplicate_fraction: 0.02,
        }
    }
}

fn round_to(v: f64, decimals: i32) -> f64 {
    let s = 10f64.powi(decimals);
    (v * s).round() / s
}

/// A value inside bin `k` of `spec`, clipped to `[lo, hi]`.
fn value_in_bin(spec: &BinningSpec, k: usize, lo: f64, hi: f64, decimals: i32, r: &mut Rng) -> f64 {
    let a = spec.edges[k].max(lo);
    let b = spec.edges[k + 1].min(hi).max(a);
    for _ in 0..32 {
        let v = round_to(a + (b - a) * r.gen_range(0.0..=1.0), decimals);
        if spec.bin_index(v) == Some(k) {
            return v;
        }
    }
    // right edges are closed
    spec.edges[k + 1].min(hi)
}

struct Row {
    numeric: Vec<Option<f64>>,
    sex: f64,
    race: f64,
    married: usize,
    priority: usize,
    flags: Vec<bool>,
}

pub fn cohort(cfg: &SynthConfig) -> Result<Table> {
    let preset = veterans_t2dm();
    let measures = &MEASURES;
    let spec_of = |name: &str| preset.binning.iter().find(|b| b.variable == name);
    let mut r = rng(cfg.seed);
    // first rows walk every level (and one missing) of each variable
    let coverage = PRIORITY.len() + 1;
    let flag_names: Vec<&str> = MEDICATIONS.iter().chain(COMORBIDITIES.iter()).copied().collect();

    let mut rows: Vec<Row> = Vec::with_capacity(cfg.n_rows);
    for i in 0..cfg.n_rows {
        let numeric = measures
            .iter()
            .map(|&(name, lo, hi, dec, miss)| {
                let spec = spec_of(name);
                if i < coverage {
                    return match spec {
                        Some(s) if i == s.labels.len() => (miss > 0.0).then_some(lo),
                        Some(s) => Some(value_in_bin(s, i % s.labels.len(), lo, hi, dec, &mut r)),
                        None if miss > 0.0 && i == 0 => None,
                        None => Some(round_to(r.gen_range(lo..=hi), dec)),
                    };
                }
                if r.gen_bool(miss) {
                    return None;
                }
                // skew toward the low end, where most of a cohort sits
                let u: f64 = r.gen_range(0.0..1.0);
                Some(round_to(lo + (hi - lo) * u * u.sqrt(), dec))
            })
            .collect();
        rows.push(Row {
            numeric,
            sex: if i < 2 { i as f64 } else { f64::from(u8::from(r.gen_bool(0.9))) },
            race: if i < 3 { (i + 1) as f64 } else { [1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 3.0][r.gen_range(0..7)] },
            married: if i < coverage { i % MARITAL.len() } else { [0, 0, 0, 1, 2][r.gen_range(0..5)] },
            priority: if i < coverage { i % PRIORITY.len() } else { r.gen_range(0..PRIORITY.len()) },
            flags: flag_names.iter().map(|_| r.gen_bool(0.2)).collect(),
        });
    }

    let idx = |name: &str| measures.iter().position(|m| m.0 == name).expect("known measure");
    let flag = |row: &Row, name: &str| {
        f64::from(u8::from(row.flags[flag_names.iter().position(|f| *f == name).expect("known flag")]))
    };
    let latent: Vec<f64> = rows
        .iter()
        .map(|row| {
            let num = |name: &str| row.numeric[idx(name)];
            let risk = 0.09 * (num("AGE").unwrap_or(75.0) - 75.0)
                + 4.0 * num("FRAILITY").unwrap_or(0.1)
                + 0.8 * flag(row, "CHF")
                + 0.7 * flag(row, "RENAL")
                + 1.0 * flag(row, "METS")
                + 0.6 * f64::from(u8::from(num("SERUMALB").is_some_and(|v| v < 3.5)))
                + 0.04 * num("N_IP").unwrap_or(0.0)
                - 0.4 * flag(row, "OBESITY")
                - 0.3 * f64::from(u8::from(row.married == 0));
            let u: f64 = r.gen_range(1e-12..1.0);
            risk + (u / (1.0 - u)).ln()
        })
        .collect();
    // cut points at the 42nd and 76th percentiles give roughly 24/34/42
    let mut sorted = latent.clone();
    sorted.sort_by(f64::total_cmp);
    let cut = |q: f64| sorted[((q * sorted.len() as f64) as usize).min(sorted.len() - 1)];
    let (lo, hi) = (cut(0.42), cut(0.76));
    let classes: Vec<u8> = latent
        .iter()
        .map(|&z| if z >= hi { 0 } else if z >= lo { 1 } else { 2 })
        .collect();

    let mut order: Vec<usize> = (0..cfg.n_rows).collect();
    let n_dup = (cfg.duplicate_fraction * cfg.n_rows as f64).floor() as usize;
    for d in 0..n_dup.min(cfg.n_rows.saturating_sub(coverage + 1)) {
        let target = cfg.n_rows - 1 - d;
        order[target] = r.gen_range(coverage..target);
    }

    let mut cols: Vec<(String, Column)> = Vec::new();
    let num_col = |f: &dyn Fn(usize) -> Option<f64>| Column::numeric(order.iter().map(|&i| f(i)));
    cols.push(("AGE".into(), num_col(&|i| rows[i].numeric[idx("AGE")])));
    cols.push(("SEX".into(), num_col(&|i| Some(rows[i].sex))));
    cols.push((
        "MARRIED".into(),
        Column::categorical(order.iter().map(|&i| Some(MARITAL[rows[i].married]))),
    ));
    cols.push(("RACE".into(), num_col(&|i| Some(rows[i].race))));
    cols.push((
        "PRIORITY".into(),
        Column::categorical(order.iter().map(|&i| Some(PRIORITY[rows[i].priority]))),
    ));
    for name in [
        "BMI", "DIASTOLIC", "SYSTOLIC", "HDL", "LDL", "A1C", "TRI", "MICROALB", "SERUMALB", "SERUMCRE",
    ] {
        cols.push((name.into(), num_col(&|i| rows[i].numeric[idx(name)])));
    }
    for (j, name) in flag_names.iter().enumerate() {
        cols.push(((*name).into(), num_col(&|i| Some(f64::from(u8::from(rows[i].flags[j]))))));
    }
    for name in ["FRAILITY", "N_IP", "N_OP"] {
        cols.push((name.into(), num_col(&|i| rows[i].numeric[idx(name)])));
    }
    cols.push((DEATH_5.into(), num_col(&|i| Some(f64::from(u8::from(classes[i] == 0))))));
    cols.push((DEATH_10.into(), num_col(&|i| Some(f64::from(u8::from(classes[i] <= 1))))));
    Table::new(cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{encode, prepare};

    #[test]
    fn layout_and_preparation() {
        let t = cohort(&SynthConfig::default()).unwrap();
        assert_eq!(t.n_cols(), 70);
        assert_eq!(t.n_rows(), 500);
        let p = prepare(&t, &veterans_t2dm()).unwrap();
        assert!(p.counts.duplicates_removed > 0);
        assert!(p.counts.class_counts.iter().all(|&c| c > 50), "{:?}", p.counts.class_counts);
        let e = encode(&p.table, &veterans_t2dm()).unwrap();
        assert_eq!(e.n_cols(), 97);
    }

    #[test]
    fn deterministic() {
        let cfg = SynthConfig {
            n_rows: 60,
            seed: 9,
            ..SynthConfig::default()
        };
        assert_eq!(cohort(&cfg).unwrap(), cohort(&cfg).unwrap());
    }
}
