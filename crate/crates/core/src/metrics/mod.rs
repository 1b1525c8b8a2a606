//! Confusion matrices, per-class reports, Cohen's kappa and ROC curves.

mod confusion;
mod kappa;
mod roc;

pub use confusion::{
    classification_report, confusion_matrix, Averages, ClassMetrics, ClassificationReport,
    ConfusionMatrix,
};
pub use kappa::{cohen_kappa, kappa_from_counts, AgreementBand, KappaResult};
pub use roc::{binarize, micro_average_roc, roc_curve, RocCurve};
