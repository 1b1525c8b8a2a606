//! Tabular multiclass classification toolkit built around a three-band
//! mortality target: CSV tables and cleaning, target fusion and binning,
//! chi-squared / information-gain feature filtering, deterministic
//! resampling, five classifier families and evaluation metrics.

pub mod error;
pub mod learners;
pub mod metrics;
pub mod pipeline;
pub mod sampling;
pub mod stats;
pub mod synth;
pub mod tabular;

pub use error::{Error, ErrorKind, Result};
