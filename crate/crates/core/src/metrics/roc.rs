use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// Descending; the first entry is `+inf` (nothing predicted positive).
    #[serde(with = "crate::pipeline::binning::edge_serde")]
    pub thresholds: Vec<f64>,
    pub fpr: Vec<f64>,
    pub tpr: Vec<f64>,
    pub auc: f64,
}

/// Positive iff `score >= threshold`, one point per distinct score.
pub fn roc_curve(y_true: &[u8], scores: &[f64]) -> Result<RocCurve> {
    if y_true.len() != scores.len() {
        return Err(Error::Mismatch {
            left: y_true.len(),
            right: scores.len(),
        });
    }
    if let Some(v) = y_true.iter().find(|&&v| v > 1) {
        return Err(Error::OutOfBounds {
            what: "binary label",
            detail: v.to_string(),
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("roc scores"));
    }
    let pos = y_true.iter().filter(|&&v| v == 1).count();
    let neg = y_true.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut thresholds = vec![f64::INFINITY];
    let (mut fpr, mut tpr) = (vec![0.0], vec![0.0]);
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if y_true[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        thresholds.push(s);
        fpr.push(fp as f64 / neg as f64);
        tpr.push(tp as f64 / pos as f64);
    }
    let auc = fpr
        .windows(2)
        .zip(tpr.windows(2))
        .map(|(f, t)| (f[1] - f[0]) * (t[0] + t[1]) / 2.0)
        .sum();
    Ok(RocCurve {
        thresholds,
        fpr,
        tpr,
        auc,
    })
}

/// Pools every class's (truth, score) pairs into one curve.
pub fn micro_average_roc(truths: &[Vec<u8>], scores: &[Vec<f64>]) -> Result<RocCurve> {
    if truths.len() != scores.len() {
        return Err(Error::Mismatch {
            left: truths.len(),
            right: scores.len(),
        });
    }
    roc_curve(&truths.concat(), &scores.concat())
}

/// `1` where `y == class`, else `0`.
pub fn binarize(y: &[u8], class: u8) -> Vec<u8> {
    y.iter().map(|&v| u8::from(v == class)).collect()
}

impl RocCurve {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("threshold,fpr,tpr\n");
        for ((t, f), p) in self.thresholds.iter().zip(&self.fpr).zip(&self.tpr) {
            let t = if t.is_infinite() { "inf".to_string() } else { t.to_string() };
            s.push_str(&format!("{t},{f},{p}\n"));
        }
        s
    }
}
