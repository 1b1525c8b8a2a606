#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mortband::synth::{cohort, SynthConfig};
use mortband::tabular::write_csv;
use serde_json::{json, Value};

pub fn pipeline(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pipeline"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn write_fixture(dir: &Path, n_rows: usize, seed: u64) -> PathBuf {
    let path = dir.join("cohort.csv");
    let t = cohort(&SynthConfig {
        n_rows,
        seed,
        ..SynthConfig::default()
    })
    .unwrap();
    write_csv(&t, &path).unwrap();
    path
}

/// Small but complete configuration: every family, with and without
/// selection and grids.
pub fn small_config(input: &Path) -> Value {
    json!({
        "input": input,
        "test_fraction": 0.25,
        "seeds": {"split": 42, "balance": 42, "model": 42},
        "cv_folds": 3,
        "models": [
            {"name": "lr_chi2", "family": "lr", "selector": {"method": "chi2", "k": 30},
             "params": {"class_weight": "balanced"},
             "grid": {"penalty": ["l2", null], "C": [0.1, 1.0]}},
            {"name": "lasso", "family": "lasso", "params": {"n_lambda": 8}},
            {"name": "rf_ig", "family": "random_forest", "selector": {"method": "mutual_info", "k": 30},
             "params": {"n_estimators": 15, "max_depth": 6, "min_samples_leaf": 2}},
            {"name": "gbt", "family": "gradient_boosting",
             "params": {"n_estimators": 10, "colsample_bytree": 0.8, "learning_rate": 0.1}},
            {"name": "ovr", "family": "ovr", "selector": {"method": "chi2", "k": 30},
             "params": {"class_weight": "balanced", "penalty": "none"}}
        ]
    })
}

pub fn write_config(dir: &Path, cfg: &Value) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    p
}

pub fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Relative paths of every file below `dir`, sorted.
pub fn files(dir: &Path) -> Vec<PathBuf> {
    fn walk(base: &Path, dir: &Path, out: &mut Vec<PathBuf>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(base, &p, out);
            } else {
                out.push(p.strip_prefix(base).unwrap().to_owned());
            }
        }
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out);
    out.sort();
    out
}
