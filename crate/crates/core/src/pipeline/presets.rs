use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::binning::BinningSpec;
use super::encoding::DummyPlan;
use crate::error::{Error, Result};

/// Everything dataset-specific about preparation and encoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    /// Dropped right after target fusion (too sparse to keep).
    #[serde(default)]
    pub drop_sparse: Vec<String>,
    pub binning: Vec<BinningSpec>,
    #[serde(default = "default_missing_label")]
    pub missing_label: String,
    #[serde(default)]
    pub fill_missing: Vec<String>,
    #[serde(default)]
    pub decode: Vec<Decode>,
    /// Dropped before encoding because bivariate analysis rejected them.
    #[serde(default)]
    pub drop_before_encoding: Vec<String>,
    pub dummy_plan: DummyPlan,
}

fn default_missing_label() -> String {
    "Missing".to_owned()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decode {
    pub column: String,
    pub mapping: BTreeMap<String, String>,
}

pub const VETERANS_T2DM: &str = "veterans-t2dm";

pub fn by_name(name: &str) -> Result<Preset> {
    match name {
        VETERANS_T2DM => Ok(veterans_t2dm()),
        other => Err(Error::Config(format!("unknown preset `{other}`"))),
    }
}

const INF: f64 = f64::INFINITY;
const NINF: f64 = f64::NEG_INFINITY;

fn spec(variable: &str, new_name: &str, edges: &[f64], labels: &[&str]) -> BinningSpec {
    BinningSpec::new(variable, new_name, edges, labels, true).expect("preset bins are valid")
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| (*s).to_owned()).collect()
}

/// The veterans type-2 diabetes cohort layout.
pub fn veterans_t2dm() -> Preset {
    let binning = vec![
        spec(
            "AGE",
            "AGE_GROUP",
            &[65.0, 69.0, 74.0, 79.0, 84.0, 89.0, INF],
            &["65-69", "70-74", "75-79", "80-84", "85-89", ">=90"],
        ),
        spec(
            "BMI",
            "BMI_RANGE",
            &[10.0, 18.4, 24.9, 39.9, 49.9, INF],
            &["<18.5", "18.5-24.9", "25-39.9", "40-49.9", ">=50"],
        ),
        spec("A1C", "A1C_RANGE", &[NINF, 7.9, 9.0, INF], &["<8", "8-9", ">9"]),
        spec("SERUMALB", "SERUMALB_RANGE", &[NINF, 3.49, INF], &["<3.5", ">=3.5"]),
        spec(
            "SERUMCRE",
            "SERUMCRE_RANGE",
            &[NINF, 1.49, 3.00, INF],
            &["<1.5", "1.5-3.0", ">3.0"],
        ),
        spec("N_IP", "N_IP_RANGE", &[0.0, 5.0, INF], &["0-5", ">5"]),
        spec("N_OP", "N_OP_RANGE", &[0.0, 5.0, 30.0, INF], &["0-5", "6-30", ">30"]),
        spec(
            "SYSTOLIC",
            "SYSTOLIC_RANGE",
            &[NINF, 119.0, 129.0, 139.0, 179.0, INF],
            &["<120", "120-129", "130-139", "140-179", ">=180"],
        ),
        spec(
            "DIASTOLIC",
            "DIASTOLIC_RANGE",
            &[NINF, 79.0, 89.0, INF],
            &["<80", "80-89", ">=90"],
        ),
        spec(
            "TRI",
            "TRI_RANGE",
            &[NINF, 149.99, 199.99, INF],
            &["<150", "150-199.99", ">=200"],
        ),
        spec(
            "LDL",
            "LDL_RANGE",
            &[NINF, 99.99, 129.99, 159.99, 189.99, INF],
            &["<100", "100-129.99", "130-159.99", "160-189.99", ">=190"],
        ),
        spec(
            "HDL",
            "HDL_RANGE",
            &[NINF, 39.99, 59.99, INF],
            &["<40", "40-59.99", ">=60"],
        ),
        spec(
            "FRAILITY",
            "FRAILITY_GROUP",
            &[0.0, 0.1, 0.2, 0.3, 0.4, INF],
            &["Non-frail", "Pre-frail", "Mild", "Moderate", "Severe"],
        ),
    ];
    let race = [("1", "White"), ("2", "Black"), ("3", "Other")]
        .into_iter()
        .map(|(k, v)| (k.to_owned(), v.to_owned()))
        .collect();
    Preset {
        name: VETERANS_T2DM.to_owned(),
        drop_sparse: strings(&["MICROALB"]),
        binning,
        missing_label: default_missing_label(),
        fill_missing: strings(&[
            "SERUMALB_RANGE",
            "LDL_RANGE",
            "SERUMCRE_RANGE",
            "HDL_RANGE",
            "TRI_RANGE",
        ]),
        decode: vec![Decode {
            column: "RACE".to_owned(),
            mapping: race,
        }],
        drop_before_encoding: strings(&["SEX", "RACE", "FRAILITY_GROUP"]),
        dummy_plan: DummyPlan {
            columns: strings(&[
                "MARRIED",
                "PRIORITY",
                "AGE_GROUP",
                "BMI_RANGE",
                "A1C_RANGE",
                "SERUMALB_RANGE",
                "SERUMCRE_RANGE",
                "N_IP_RANGE",
                "N_OP_RANGE",
                "SYSTOLIC_RANGE",
                "DIASTOLIC_RANGE",
                "TRI_RANGE",
                "LDL_RANGE",
                "HDL_RANGE",
            ]),
            drop: strings(&[
                "PRIORITY_Unknown",
                "MARRIED_MARRIED",
                "N_OP_RANGE_6-30",
                "BMI_RANGE_25-39.9",
                "A1C_RANGE_<8",
                "AGE_GROUP_65-69",
                "N_IP_RANGE_0-5",
                "DIASTOLIC_RANGE_<80",
                "SYSTOLIC_RANGE_<120",
                "SERUMCRE_RANGE_<1.5",
                "HDL_RANGE_40-59.99",
                "LDL_RANGE_<100",
                "TRI_RANGE_<150",
                "SERUMALB_RANGE_>=3.5",
            ]),
        },
    }
}
