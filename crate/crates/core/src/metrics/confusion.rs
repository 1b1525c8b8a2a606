use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rows are actual classes, columns predicted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

pub fn confusion_matrix(y_true: &[u8], y_pred: &[u8], n_classes: usize) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::Mismatch {
            left: y_true.len(),
            right: y_pred.len(),
        });
    }
    let mut counts = vec![vec![0u64; n_classes]; n_classes];
    for (&a, &p) in y_true.iter().zip(y_pred) {
        if a as usize >= n_classes || p as usize >= n_classes {
            return Err(Error::OutOfBounds {
                what: "class code",
                detail: format!("{} with {n_classes} classes", a.max(p)),
            });
        }
        counts[a as usize][p as usize] += 1;
    }
    Ok(ConfusionMatrix {
        labels: (0..n_classes).map(|c| c.to_string()).collect(),
        counts,
    })
}

impl ConfusionMatrix {
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let n = counts.len();
        if let Some(bad) = counts.iter().find(|r| r.len() != n) {
            return Err(Error::Mismatch {
                left: bad.len(),
                right: n,
            });
        }
        Ok(ConfusionMatrix {
            labels: (0..n).map(|c| c.to_string()).collect(),
            counts,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n_classes() {
            return Err(Error::Mismatch {
                left: labels.len(),
                right: self.n_classes(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_total(&self, c: usize) -> u64 {
        self.counts[c].iter().sum()
    }

    pub fn col_total(&self, c: usize) -> u64 {
        self.counts.iter().map(|r| r[c]).sum()
    }

    pub fn tp(&self, c: usize) -> u64 {
        self.counts[c][c]
    }

    pub fn fp(&self, c: usize) -> u64 {
        self.col_total(c) - self.tp(c)
    }

    pub fn fn_(&self, c: usize) -> u64 {
        self.row_total(c) - self.tp(c)
    }

    pub fn tn(&self, c: usize) -> u64 {
        self.total() - self.row_total(c) - self.col_total(c) + self.tp(c)
    }

    pub fn accuracy(&self) -> f64 {
        let trace: u64 = (0..self.n_classes()).map(|c| self.tp(c)).sum();
        trace as f64 / self.total() as f64
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("actual\\predicted");
        for l in &self.labels {
            write!(s, ",{l}").expect("string write");
        }
        s.push('\n');
        for (l, row) in self.labels.iter().zip(&self.counts) {
            s.push_str(l);
            for v in row {
                write!(s, ",{v}").expect("string write");
            }
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    /// Set when a ratio had a zero denominator and was reported as 0.
    pub zero_division: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub classes: Vec<ClassMetrics>,
    pub accuracy: f64,
    pub macro_avg: Averages,
    pub weighted_avg: Averages,
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

pub fn classification_report(cm: &ConfusionMatrix) -> Result<ClassificationReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::TooSmall { rows: 0, cols: cm.n_classes() });
    }
    let classes: Vec<ClassMetrics> = (0..cm.n_classes())
        .map(|c| {
            let (precision, zp) = ratio(cm.tp(c), cm.col_total(c));
            let (recall, zr) = ratio(cm.tp(c), cm.row_total(c));
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            ClassMetrics {
                label: cm.labels[c].clone(),
                precision,
                recall,
                f1,
                support: cm.row_total(c),
                zero_division: zp || zr,
            }
        })
        .collect();
    let k = classes.len() as f64;
    let macro_avg = Averages {
        precision: classes.iter().map(|m| m.precision).sum::<f64>() / k,
        recall: classes.iter().map(|m| m.recall).sum::<f64>() / k,
        f1: classes.iter().map(|m| m.f1).sum::<f64>() / k,
        support: total,
    };
    let w = |f: fn(&ClassMetrics) -> f64| {
        classes.iter().map(|m| f(m) * m.support as f64).sum::<f64>() / total as f64
    };
    let weighted_avg = Averages {
        precision: w(|m| m.precision),
        recall: w(|m| m.recall),
        f1: w(|m| m.f1),
        support: total,
    };
    Ok(ClassificationReport {
        accuracy: cm.accuracy(),
        classes,
        macro_avg,
        weighted_avg,
    })
}

impl ClassificationReport {
    /// Fixed-width text: two decimals for per-class figures, four for
    /// accuracy.
    pub fn to_text(&self) -> String {
        let width = self
            .classes
            .iter()
            .map(|c| c.label.len())
            .chain(["weighted avg".len()])
            .max()
            .unwrap_or(0);
        let mut s = String::new();
        let line = |s: &mut String, name: &str, p: f64, r: f64, f: f64, n: u64| {
            writeln!(s, "{name:>width$}  {p:>9.2} {r:>9.2} {f:>9.2} {n:>9}").expect("string write");
        };
        writeln!(
            s,
            "{:>width$}  {:>9} {:>9} {:>9} {:>9}\n",
            "", "precision", "recall", "f1-score", "support"
        )
        .expect("string write");
        for c in &self.classes {
            line(&mut s, &c.label, c.precision, c.recall, c.f1, c.support);
        }
        s.push('\n');
        writeln!(
            s,
            "{:>width$}  {:>9} {:>9} {:>9.4} {:>9}",
            "accuracy", "", "", self.accuracy, self.macro_avg.support
        )
        .expect("string write");
        let m = &self.macro_avg;
        line(&mut s, "macro avg", m.precision, m.recall, m.f1, m.support);
        let w = &self.weighted_avg;
        line(&mut s, "weighted avg", w.precision, w.recall, w.f1, w.support);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_derived() {
        let cm = confusion_matrix(&[0, 0, 1, 2, 2], &[0, 1, 1, 2, 0], 3).unwrap();
        assert_eq!(cm.counts, vec![vec![1, 1, 0], vec![0, 1, 0], vec![1, 0, 1]]);
        assert_eq!((cm.tp(0), cm.fp(0), cm.fn_(0), cm.tn(0)), (1, 1, 1, 2));
        assert!(confusion_matrix(&[0, 3], &[0, 0], 3).is_err());
        assert!(cm.to_csv().starts_with("actual\\predicted,0,1,2\n0,1,1,0\n"));
    }

    #[test]
    fn zero_division_flagged() {
        let cm = confusion_matrix(&[0, 0, 1], &[0, 0, 0], 2).unwrap();
        let r = classification_report(&cm).unwrap();
        assert_eq!(r.classes[1].precision, 0.0);
        assert!(r.classes[1].zero_division);
        assert!(!r.classes[0].zero_division);
    }

    #[test]
    fn text_layout() {
        let cm = confusion_matrix(&[0, 1, 1], &[0, 1, 0], 2)
            .unwrap()
            .with_labels(vec!["Class 1".into(), "Class 2".into()])
            .unwrap();
        let t = classification_report(&cm).unwrap().to_text();
        assert!(t.contains("     Class 1       0.50      1.00      0.67         1"), "{t}");
        assert!(t.contains("    accuracy                         0.6667         3"), "{t}");
    }
}
