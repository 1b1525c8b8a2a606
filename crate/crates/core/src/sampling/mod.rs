//! Seeded, stratified resampling: holdout split, random under-sampling and
//! k-fold plans. Every function is a pure function of its inputs and seed.
//!
//! Randomness comes from xoshiro256++ seeded through splitmix64
//! (`seed_from_u64`), with Fisher-Yates shuffles, so selections are the same
//! on every platform.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rng = Xoshiro256PlusPlus;

pub fn rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Independent stream seed for sub-task `index` of a run seeded with `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer over a golden-ratio offset
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Member indices of each class code, ascending.
pub fn class_members(y: &[u8]) -> Vec<Vec<usize>> {
    let n_classes = y.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut members = vec![Vec::new(); n_classes];
    for (i, &c) in y.iter().enumerate() {
        members[c as usize].push(i);
    }
    members
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitResult {
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

/// Per-class test quotas: `ceil(f·N)` test rows in total, each class gets
/// `floor(f·n_c)` and the leftover goes to the largest fractional parts
/// (ties to the lower class code).
pub fn test_quotas(counts: &[usize], test_fraction: f64) -> Vec<usize> {
    let total: usize = counts.iter().sum();
    let n_test = (test_fraction * total as f64).ceil() as usize;
    let exact: Vec<f64> = counts.iter().map(|&n| n as f64 * test_fraction).collect();
    let mut quotas: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    let mut left = n_test.saturating_sub(quotas.iter().sum());
    for &c in order.iter().cycle().take(counts.len() * 2) {
        if left == 0 {
            break;
        }
        if quotas[c] < counts[c] {
            quotas[c] += 1;
            left -= 1;
        }
    }
    quotas
}

pub fn stratified_split(y: &[u8], test_fraction: f64, seed: u64) -> Result<SplitResult> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::OutOfBounds {
            what: "test_fraction",
            detail: format!("{test_fraction} not in (0, 1)"),
        });
    }
    let members = class_members(y);
    for (c, m) in members.iter().enumerate() {
        if !m.is_empty() && m.len() < 2 {
            return Err(Error::ClassTooSmall {
                class: c,
                count: m.len(),
                needed: 2,
            });
        }
    }
    let counts: Vec<usize> = members.iter().map(Vec::len).collect();
    let quotas = test_quotas(&counts, test_fraction);
    let mut rng = rng(seed);
    let mut train = Vec::with_capacity(y.len());
    let mut test = Vec::with_capacity(y.len());
    for (mut m, q) in members.into_iter().zip(quotas) {
        m.shuffle(&mut rng);
        test.extend_from_slice(&m[..q]);
        train.extend_from_slice(&m[q..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitResult {
        train_indices: train,
        test_indices: test,
    })
}

/// Keeps `min_c n_c` rows of every class present, chosen uniformly without
/// replacement; the minority keeps all its rows. Output is ascending.
pub fn random_under_sample(y: &[u8], seed: u64) -> Result<Vec<usize>> {
    let members: Vec<Vec<usize>> = class_members(y)
        .into_iter()
        .filter(|m| !m.is_empty())
        .collect();
    if members.len() < 2 {
        return Err(Error::SingleClass);
    }
    let m = members.iter().map(Vec::len).min().expect("non-empty");
    let mut rng = rng(seed);
    let mut kept = Vec::with_capacity(m * members.len());
    for mut cls in members {
        if cls.len() > m {
            cls.shuffle(&mut rng);
            cls.truncate(m);
        }
        kept.extend(cls);
    }
    kept.sort_unstable();
    Ok(kept)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub shuffle: bool,
    /// Validation indices of each fold, ascending.
    pub folds: Vec<Vec<usize>>,
}

impl FoldPlan {
    pub fn n_samples(&self) -> usize {
        self.folds.iter().map(Vec::len).sum()
    }

    /// Every index outside fold `i`, ascending.
    pub fn train_indices(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .folds
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .flat_map(|(_, f)| f.iter().copied())
            .collect();
        out.sort_unstable();
        out
    }
}

/// Class members (shuffled when asked) are laid out class by class and dealt
/// to folds round-robin, so each class is spread within one sample per fold
/// and fold sizes differ by at most one overall.
pub fn stratified_k_fold(y: &[u8], k: usize, seed: u64, shuffle: bool) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::OutOfBounds {
            what: "k",
            detail: format!("{k} < 2"),
        });
    }
    let members = class_members(y);
    for (c, m) in members.iter().enumerate() {
        if !m.is_empty() && m.len() < k {
            return Err(Error::ClassTooSmall {
                class: c,
                count: m.len(),
                needed: k,
            });
        }
    }
    let mut rng = rng(seed);
    let mut folds = vec![Vec::with_capacity(y.len() / k + 1); k];
    let mut p = 0usize;
    for mut m in members {
        if shuffle {
            m.shuffle(&mut rng);
        }
        for i in m {
            folds[p % k].push(i);
            p += 1;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(FoldPlan {
        k,
        seed,
        shuffle,
        folds,
    })
}
