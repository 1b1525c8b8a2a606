use std::collections::HashMap;
use std::hash::Hash;

use super::chi2::ContingencyTable;
use crate::error::{Error, Result};

/// Shannon entropy in bits; empty categories contribute nothing.
pub fn entropy(counts: &[u64]) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyHistogram);
    }
    Ok(entropy_of(counts.iter().copied(), total as f64))
}

fn entropy_of(counts: impl Iterator<Item = u64>, total: f64) -> f64 {
    let h: f64 = counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

/// IG = H(y) − Σ_v P(x=v)·H(y | x=v), in bits, from the x-by-y table.
pub fn mutual_information(ct: &ContingencyTable) -> f64 {
    let n = ct.total();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    let h_y = entropy_of(ct.col_totals().into_iter(), n);
    let conditional: f64 = ct
        .observed
        .iter()
        .map(|row| {
            let rt: u64 = row.iter().sum();
            if rt == 0 {
                0.0
            } else {
                rt as f64 / n * entropy_of(row.iter().copied(), rt as f64)
            }
        })
        .sum();
    (h_y - conditional).max(0.0)
}

/// Joint entropy H(x, y) in bits.
pub fn joint_entropy(ct: &ContingencyTable) -> f64 {
    entropy_of(ct.observed.iter().flatten().copied(), ct.total() as f64)
}

/// Counts co-occurrences of two equally long label slices.
pub fn crosstab_codes<X, Y>(x: &[X], y: &[Y]) -> Result<ContingencyTable>
where
    X: Eq + Hash + Ord + ToString,
    Y: Eq + Hash + Ord + ToString,
{
    if x.len() != y.len() {
        return Err(Error::Mismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let mut xs: Vec<&X> = x.iter().collect();
    xs.sort();
    xs.dedup();
    let mut ys: Vec<&Y> = y.iter().collect();
    ys.sort();
    ys.dedup();
    let xi: HashMap<&X, usize> = xs.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let yi: HashMap<&Y, usize> = ys.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut observed = vec![vec![0u64; ys.len()]; xs.len()];
    for (a, b) in x.iter().zip(y) {
        observed[xi[a]][yi[b]] += 1;
    }
    ContingencyTable::from_counts(
        xs.iter().map(|v| v.to_string()).collect(),
        ys.iter().map(|v| v.to_string()).collect(),
        observed,
    )
}

pub fn information_gain<X, Y>(x: &[X], y: &[Y]) -> Result<f64>
where
    X: Eq + Hash + Ord + ToString,
    Y: Eq + Hash + Ord + ToString,
{
    if x.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    Ok(mutual_information(&crosstab_codes(x, y)?))
}
