use std::collections::BTreeMap;
use std::time::Instant;

use mortband::learners::{fit_model, grid_search_cv, Family, Matrix, Model, ModelDocument};
use mortband::metrics::{
    binarize, classification_report, cohen_kappa, confusion_matrix, micro_average_roc, roc_curve,
    KappaResult,
};
use mortband::pipeline::mortality::{target_codes, MortalityClass, TARGET};
use mortband::pipeline::{encode, prepare};
use mortband::sampling::{random_under_sample, stratified_k_fold, stratified_split};
use mortband::stats::{bivariate, class_association_matrix, select_k_best};
use mortband::tabular::{read_csv, write_csv_to_writer, Table};
use mortband::{Error, Result};
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::manifest::Run;

pub const CLEANED: &str = "data/cleaned.csv";
pub const TRAIN_RAW: &str = "data/train_raw.csv";
pub const TRAIN: &str = "data/train.csv";
pub const TEST: &str = "data/test.csv";
pub const BALANCED: &str = "data/train_balanced.csv";

const N_CLASSES: usize = 3;

fn class_labels() -> Vec<String> {
    MortalityClass::ALL.iter().map(|c| c.label().to_owned()).collect()
}

fn counts_of(y: &[u8]) -> Vec<usize> {
    let mut c = vec![0; N_CLASSES];
    for &v in y {
        c[v as usize] += 1;
    }
    c
}

fn csv_bytes(t: &Table) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_csv_to_writer(t, &mut buf)?;
    Ok(buf)
}

fn read(run: &Run, rel: &str, stage: &'static str) -> Result<Table> {
    let p = run.path(rel);
    if !p.exists() {
        return Err(Error::Config(format!(
            "{} is missing; run the `{stage}` step first",
            p.display()
        )));
    }
    read_csv(&p, None)
}

fn timed(run: &mut Run, stage: &'static str, f: impl FnOnce(&mut Run) -> Result<()>) -> Result<()> {
    let start = Instant::now();
    f(run).map_err(|e| e.in_stage(stage))?;
    run.finish_stage(stage, start.elapsed().as_secs_f64())
}

fn snapshot(cfg: &RunConfig) -> Result<Value> {
    Ok(serde_json::to_value(cfg)?)
}

pub fn prepare_cmd(cfg: &RunConfig, run: &mut Run) -> Result<()> {
    timed(run, "prepare", |run| {
        let raw = read_csv(cfg.input()?, None)?;
        let prepared = prepare(&raw, &cfg.preset()?)?;
        run.write(CLEANED, csv_bytes(&prepared.table)?)?;
        let c = &prepared.counts;
        run.write_json(
            "reports/prepare.json",
            &json!({"counts": c, "missing_before_cleaning": prepared.missing.to_json()}),
        )?;
        run.manifest.config = Some(snapshot(cfg)?);
        let m = &mut run.manifest.counts;
        m.raw_rows = Some(c.raw_rows);
        m.duplicates_removed = Some(c.duplicates_removed);
        m.deduped_rows = Some(c.deduped_rows);
        m.class_counts_raw = Some(c.class_counts_raw.to_vec());
        m.class_counts = Some(c.class_counts.to_vec());
        m.cleaned_columns = Some(c.output_columns);
        Ok(())
    })
}

/// Encodes the whole cleaned table, then splits rows so train and test
/// share one column layout.
pub fn split_cmd(cfg: &RunConfig, run: &mut Run) -> Result<()> {
    timed(run, "split", |run| {
        let cleaned = read(run, CLEANED, "prepare")?;
        let y = target_codes(&cleaned, TARGET)?;
        let s = stratified_split(&y, cfg.test_fraction, cfg.seed("split")?)?;
        let encoded = encode(&cleaned, &cfg.preset()?)?;
        run.write(TRAIN_RAW, csv_bytes(&cleaned.select_rows(&s.train_indices))?)?;
        run.write(TRAIN, csv_bytes(&encoded.select_rows(&s.train_indices))?)?;
        run.write(TEST, csv_bytes(&encoded.select_rows(&s.test_indices))?)?;
        let pick = |idx: &[usize]| counts_of(&idx.iter().map(|&i| y[i]).collect::<Vec<_>>());
        let (tr, te) = (pick(&s.train_indices), pick(&s.test_indices));
        run.write_json(
            "reports/split.json",
            &json!({
                "train_rows": s.train_indices.len(),
                "test_rows": s.test_indices.len(),
                "train_class_counts": tr,
                "test_class_counts": te,
                "encoded_inputs": encoded.n_cols() - 1,
            }),
        )?;
        let m = &mut run.manifest.counts;
        m.train_rows = Some(s.train_indices.len());
        m.test_rows = Some(s.test_indices.len());
        m.train_class_counts = Some(tr);
        m.test_class_counts = Some(te);
        m.encoded_inputs = Some(encoded.n_cols() - 1);
        if m.deduped_rows.is_none() {
            m.deduped_rows = Some(cleaned.n_rows());
        }
        Ok(())
    })
}

pub fn balance_cmd(cfg: &RunConfig, run: &mut Run) -> Result<()> {
    timed(run, "balance", |run| {
        let train = read(run, TRAIN, "split")?;
        let y = target_codes(&train, TARGET)?;
        let kept = random_under_sample(&y, cfg.seed("balance")?)?;
        run.write(BALANCED, csv_bytes(&train.select_rows(&kept))?)?;
        let counts = counts_of(&kept.iter().map(|&i| y[i]).collect::<Vec<_>>());
        run.write_json(
            "reports/balance.json",
            &json!({"rows_before": y.len(), "rows_after": kept.len(), "class_counts": counts}),
        )?;
        let m = &mut run.manifest.counts;
        m.balanced_rows = Some(kept.len());
        m.balanced_class_counts = Some(counts);
        Ok(())
    })
}

pub fn analyze_cmd(cfg: &RunConfig, run: &mut Run) -> Result<()> {
    timed(run, "analyze", |run| {
        let t = read(run, TRAIN_RAW, "split")?;
        let pairs: Vec<[String; 2]> = cfg
            .analyze
            .variables
            .iter()
            .map(|v| [v.clone(), TARGET.to_owned()])
            .chain(cfg.analyze.pairs.iter().cloned())
            .collect();
        // a failing pair is reported and the rest still run
        let outcomes: Vec<Value> = pairs
            .into_iter()
            .map(|[a, b]| match bivariate(&t, &a, &b) {
                Ok(entry) => serde_json::to_value(&entry).map_err(Error::from),
                Err(e) => Ok(json!({"pair": [a, b], "error": e.to_string()})),
            })
            .collect::<Result<_>>()?;
        run.write_json("reports/bivariate.json", &outcomes)
    })
}

fn features_and_target(t: &Table) -> Result<(Table, Vec<u8>)> {
    let y = target_codes(t, TARGET)?;
    let names: Vec<String> = t.names().iter().filter(|n| *n != TARGET).cloned().collect();
    Ok((t.project(&names)?, y))
}

pub fn feature_analysis_cmd(_cfg: &RunConfig, run: &mut Run) -> Result<()> {
    timed(run, "feature-analysis", |run| {
        let t = read(run, BALANCED, "balance")?;
        let (x, y) = features_and_target(&t)?;
        let m = class_association_matrix(&x, &y, N_CLASSES)?;
        run.write("reports/association_chi2.csv", m.chi2_csv())?;
        run.write("reports/association_p.csv", m.p_masked_csv())?;
        run.write_json("reports/association.json", &m.to_json())
    })
}

fn model_rel(name: &str) -> String {
    format!("models/{name}.json")
}

pub fn train_cmd(cfg: &RunConfig, run: &mut Run) -> Result<()> {
    if cfg.models.is_empty() {
        return Err(Error::Config("no models configured".into()));
    }
    timed(run, "train", |run| {
        let t = read(run, BALANCED, "balance")?;
        let (x_all, y) = features_and_target(&t)?;
        let seed = cfg.seed("model")?;
        let folds = stratified_k_fold(&y, cfg.cv_folds, seed, true)?;
        for spec in &cfg.models {
            let family = Family::parse(&spec.family)?;
            let dir = format!("reports/{}", spec.name);
            let features: Vec<String> = match &spec.selector {
                Some(sel) => {
                    let s = select_k_best(&x_all, &y, sel.method, sel.k)?;
                    run.write_json(&format!("{dir}/selection.json"), &s)?;
                    let chosen: std::collections::HashSet<&String> = s.selected.iter().collect();
                    x_all.names().iter().filter(|n| chosen.contains(n)).cloned().collect()
                }
                None => x_all.names().to_vec(),
            };
            let x = Matrix::from_table(&x_all, &features)?;
            let mut params = spec.params.clone();
            let mut grid_json = Value::Null;
            if let Some(grid) = &spec.grid {
                let report = grid_search_cv(family, grid, &spec.params, seed, &folds, &x, &y)?;
                params.extend(report.best_params.clone());
                grid_json = serde_json::to_value(&report)?;
                run.write_json(&format!("{dir}/grid.json"), &report)?;
            }
            let model = fit_model(family, &params, seed, &x, &y, Some(&folds))?;
            let mut summary = Map::new();
            summary.insert("family".into(), json!(family));
            summary.insert("n_features".into(), json!(features.len()));
            summary.insert("params".into(), Value::Object(params));
            if !grid_json.is_null() {
                summary.insert("best_score".into(), grid_json["best_score"].clone());
            }
            match &model {
                Model::Lr(m) => {
                    summary.insert("converged".into(), json!(m.converged));
                    summary.insert("iterations".into(), json!(m.iterations));
                }
                Model::Lasso(m) => {
                    summary.insert("lambda".into(), json!(m.lambda));
                    summary.insert("selected".into(), json!(m.selected));
                    summary.insert("n_selected".into(), json!(m.selected.len()));
                }
                _ => {}
            }
            run.write_json(&format!("{dir}/train.json"), &summary)?;
            run.write(&model_rel(&spec.name), ModelDocument::new(model).to_json()?)?;
        }
        Ok(())
    })
}

fn round4(v: f64) -> f64 {
    (v * 1e4).round() / 1e4
}

pub fn evaluate_cmd(cfg: &RunConfig, run: &mut Run) -> Result<()> {
    if cfg.models.is_empty() {
        return Err(Error::Config("no models configured".into()));
    }
    timed(run, "evaluate", |run| {
        let test = read(run, TEST, "split")?;
        let names: Vec<String> = test.names().iter().filter(|n| *n != TARGET).cloned().collect();
        let x_all = test.project(&names)?;
        let mut summary = Map::new();
        let mut predictions: Vec<(String, Vec<u8>)> = Vec::new();
        for spec in &cfg.models {
            let rel = model_rel(&spec.name);
            let text = std::fs::read_to_string(run.path(&rel)).map_err(|_| {
                Error::Config(format!("{rel} is missing; run the `train` step first"))
            })?;
            let model = ModelDocument::from_json(&text)?.model;
            let x = Matrix::from_table(&x_all, model.feature_names())?;
            // predictions are made before the test target is touched
            let pred = model.predict(&x)?;
            let scores = (model.family() == Family::Ovr)
                .then(|| model.decision_scores(&x))
                .transpose()?;
            let y = target_codes(&test, TARGET)?;

            let dir = format!("reports/{}", spec.name);
            let mut p = String::from("row,predicted\n");
            for (i, c) in pred.iter().enumerate() {
                p.push_str(&format!("{i},{c}\n"));
            }
            run.write(&format!("{dir}/predictions.csv"), p)?;
            let cm = confusion_matrix(&y, &pred, N_CLASSES)?.with_labels(class_labels())?;
            let report = classification_report(&cm)?;
            let kappa = cohen_kappa(&y, &pred)?;
            run.write(&format!("{dir}/confusion_matrix.csv"), cm.to_csv())?;
            run.write(&format!("{dir}/classification_report.txt"), report.to_text())?;
            run.write_json(&format!("{dir}/classification_report.json"), &report)?;
            run.write_json(&format!("{dir}/kappa.json"), &kappa)?;
            let mut entry = json!({
                "family": model.family(),
                "accuracy": round4(report.accuracy),
                "kappa": round4(kappa.kappa),
                "agreement": kappa.band.as_str(),
                "recall": report.classes.iter().map(|c| round4(c.recall)).collect::<Vec<_>>(),
            });
            if let Some(scores) = scores {
                let mut aucs = Map::new();
                let mut truths = Vec::new();
                let mut cols = Vec::new();
                for (c, label) in class_labels().iter().enumerate() {
                    let yt = binarize(&y, c as u8);
                    let s: Vec<f64> = scores.iter().map(|r| r[c]).collect();
                    let roc = roc_curve(&yt, &s)?;
                    run.write(&format!("{dir}/roc_class{}.csv", c + 1), roc.to_csv())?;
                    aucs.insert(label.clone(), json!(roc.auc));
                    truths.push(yt);
                    cols.push(s);
                }
                let micro = micro_average_roc(&truths, &cols)?;
                run.write(&format!("{dir}/roc_micro.csv"), micro.to_csv())?;
                aucs.insert("micro".into(), json!(micro.auc));
                run.write_json(&format!("{dir}/auc.json"), &aucs)?;
                entry["auc"] = Value::Object(aucs);
            }
            summary.insert(spec.name.clone(), entry);
            predictions.push((spec.name.clone(), pred));
        }
        run.write_json("reports/summary.json", &summary)?;
        let mut agreement: BTreeMap<String, KappaResult> = BTreeMap::new();
        for (i, (a, pa)) in predictions.iter().enumerate() {
            for (b, pb) in &predictions[i + 1..] {
                agreement.insert(format!("{a} vs {b}"), cohen_kappa(pa, pb)?);
            }
        }
        run.write_json("reports/agreement.json", &agreement)
    })
}

pub fn run_all(cfg: &RunConfig, run: &mut Run) -> Result<()> {
    prepare_cmd(cfg, run)?;
    split_cmd(cfg, run)?;
    balance_cmd(cfg, run)?;
    analyze_cmd(cfg, run)?;
    feature_analysis_cmd(cfg, run)?;
    if !cfg.models.is_empty() {
        train_cmd(cfg, run)?;
        evaluate_cmd(cfg, run)?;
    }
    Ok(())
}
