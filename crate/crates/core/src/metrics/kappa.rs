use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgreementBand {
    None,
    Slight,
    Fair,
    Moderate,
    Substantial,
    AlmostPerfect,
}

impl AgreementBand {
    /// Upper-inclusive cut points 0, 0.20, 0.40, 0.60, 0.80.
    pub fn of(kappa: f64) -> Self {
        match kappa {
            k if k <= 0.0 => AgreementBand::None,
            k if k <= 0.20 => AgreementBand::Slight,
            k if k <= 0.40 => AgreementBand::Fair,
            k if k <= 0.60 => AgreementBand::Moderate,
            k if k <= 0.80 => AgreementBand::Substantial,
            _ => AgreementBand::AlmostPerfect,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AgreementBand::None => "none",
            AgreementBand::Slight => "slight",
            AgreementBand::Fair => "fair",
            AgreementBand::Moderate => "moderate",
            AgreementBand::Substantial => "substantial",
            AgreementBand::AlmostPerfect => "almost perfect",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaResult {
    pub po: f64,
    pub pe: f64,
    pub kappa: f64,
    pub band: AgreementBand,
}

/// Cohen's kappa from a square agreement table.
pub fn kappa_from_counts(counts: &[Vec<u64>]) -> Result<KappaResult> {
    let k = counts.len();
    let n: u64 = counts.iter().flatten().sum();
    if n == 0 {
        return Err(Error::TooSmall { rows: 0, cols: k });
    }
    let n = n as f64;
    let po = (0..k).map(|c| counts[c][c]).sum::<u64>() as f64 / n;
    let pe = (0..k)
        .map(|c| {
            let row: u64 = counts[c].iter().sum();
            let col: u64 = counts.iter().map(|r| r[c]).sum();
            (row as f64 / n) * (col as f64 / n)
        })
        .sum::<f64>();
    let kappa = if pe >= 1.0 { 1.0 } else { (po - pe) / (1.0 - pe) };
    Ok(KappaResult {
        po,
        pe,
        kappa,
        band: AgreementBand::of(kappa),
    })
}

pub fn cohen_kappa(a: &[u8], b: &[u8]) -> Result<KappaResult> {
    if a.len() != b.len() {
        return Err(Error::Mismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let k = a.iter().chain(b).map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut counts = vec![vec![0u64; k]; k];
    for (&x, &y) in a.iter().zip(b) {
        counts[x as usize][y as usize] += 1;
    }
    kappa_from_counts(&counts)
}
