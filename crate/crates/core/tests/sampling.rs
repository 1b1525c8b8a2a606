use std::collections::BTreeSet;

use mortband::sampling::{random_under_sample, stratified_k_fold, stratified_split};
use proptest::prelude::*;

fn counts(y: &[u8], idx: &[usize]) -> Vec<usize> {
    let mut c = vec![0; 4];
    for &i in idx {
        c[y[i] as usize] += 1;
    }
    c
}

/// Labels with every one of `k` classes holding at least `min` members.
fn labels(min: usize) -> impl Strategy<Value = Vec<u8>> {
    (2u8..=4, prop::collection::vec(0u8..4, 0..120)).prop_map(move |(k, extra)| {
        let mut y: Vec<u8> = (0..k).flat_map(|c| std::iter::repeat(c).take(min)).collect();
        y.extend(extra.into_iter().map(|v| v % k));
        // interleave so class order is not positional
        let n = y.len();
        (0..n).map(|i| y[(i * 7919) % n]).collect::<Vec<_>>()
    })
}

fn is_partition(parts: &[&[usize]], n: usize) -> bool {
    let mut seen = vec![false; n];
    for p in parts {
        for &i in *p {
            if i >= n || seen[i] {
                return false;
            }
            seen[i] = true;
        }
    }
    seen.into_iter().all(|s| s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn split_partitions_and_stratifies(y in labels(2), seed: u64, f in 0.05f64..0.95) {
        let s = stratified_split(&y, f, seed).unwrap();
        prop_assert!(is_partition(&[&s.train_indices, &s.test_indices], y.len()));
        let all = counts(&y, &(0..y.len()).collect::<Vec<_>>());
        let test = counts(&y, &s.test_indices);
        for c in 0..4 {
            if all[c] > 0 {
                let share = test[c] as f64 / all[c] as f64;
                prop_assert!((share - f).abs() <= 1.0 / all[c] as f64 + 1e-12, "class {c}: {share} vs {f}");
            }
        }
        prop_assert_eq!(s.test_indices.len(), (f * y.len() as f64).ceil() as usize);
        prop_assert_eq!(&s, &stratified_split(&y, f, seed).unwrap());
    }

    #[test]
    fn undersample_equalizes(y in labels(1), seed: u64) {
        let kept = random_under_sample(&y, seed).unwrap();
        let all = counts(&y, &(0..y.len()).collect::<Vec<_>>());
        let m = all.iter().copied().filter(|&c| c > 0).min().unwrap();
        let got = counts(&y, &kept);
        for c in 0..4 {
            prop_assert_eq!(got[c], if all[c] > 0 { m } else { 0 });
        }
        prop_assert!(kept.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(kept, random_under_sample(&y, seed).unwrap());
    }

    #[test]
    fn folds_partition_and_spread(y in labels(5), seed: u64, k in 2usize..=5, shuffle: bool) {
        let plan = stratified_k_fold(&y, k, seed, shuffle).unwrap();
        let parts: Vec<&[usize]> = plan.folds.iter().map(Vec::as_slice).collect();
        prop_assert!(is_partition(&parts, y.len()));
        let sizes: Vec<usize> = plan.folds.iter().map(Vec::len).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        for c in 0..4 {
            let per: Vec<usize> = plan.folds.iter().map(|f| counts(&y, f)[c]).collect();
            prop_assert!(per.iter().max().unwrap() - per.iter().min().unwrap() <= 1);
        }
        for f in 0..k {
            let train: BTreeSet<usize> = plan.train_indices(f).into_iter().collect();
            prop_assert_eq!(train.len() + plan.folds[f].len(), y.len());
            prop_assert!(plan.folds[f].iter().all(|i| !train.contains(i)));
        }
        prop_assert_eq!(&plan, &stratified_k_fold(&y, k, seed, shuffle).unwrap());
    }
}

#[test]
fn seeds_are_byte_stable() {
    let y: Vec<u8> = (0..40).map(|i| (i * i % 3) as u8).collect();
    let a = serde_json::to_vec(&stratified_split(&y, 0.25, 42).unwrap()).unwrap();
    let b = serde_json::to_vec(&stratified_split(&y, 0.25, 42).unwrap()).unwrap();
    assert_eq!(a, b);
    assert_ne!(
        stratified_split(&y, 0.25, 42).unwrap(),
        stratified_split(&y, 0.25, 43).unwrap()
    );
}

#[test]
fn unshuffled_folds_ignore_seed() {
    let y: Vec<u8> = (0..30).map(|i| (i % 3) as u8).collect();
    assert_eq!(
        stratified_k_fold(&y, 3, 1, false).unwrap().folds,
        stratified_k_fold(&y, 3, 2, false).unwrap().folds
    );
}
