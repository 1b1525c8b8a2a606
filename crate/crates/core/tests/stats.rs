use approx::assert_relative_eq;
use mortband::stats::{
    chi2_sf, chi_square_test, class_association_matrix, crosstab_codes, entropy, information_gain,
    joint_entropy, mutual_information, select_k_best, ContingencyTable, Scorer,
};
use mortband::tabular::{Column, Table};
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson statistic written out cell by cell.
fn longhand(obs: &[Vec<u64>]) -> (f64, usize) {
    let r = obs.len();
    let c = obs[0].len();
    let n: u64 = obs.iter().flatten().sum();
    let mut stat = 0.0;
    for i in 0..r {
        let ri: u64 = obs[i].iter().sum();
        for j in 0..c {
            let cj: u64 = (0..r).map(|k| obs[k][j]).sum();
            let e = ri as f64 * cj as f64 / n as f64;
            stat += (obs[i][j] as f64 - e).powi(2) / e;
        }
    }
    (stat, (r - 1) * (c - 1))
}

fn table() -> impl Strategy<Value = Vec<Vec<u64>>> {
    (2usize..=6, 2usize..=6)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(0u64..80, c), r))
        .prop_filter("empty margin", |t| {
            t.iter().all(|r| r.iter().sum::<u64>() > 0)
                && (0..t[0].len()).all(|j| t.iter().map(|r| r[j]).sum::<u64>() > 0)
        })
}

fn h(counts: &[u64]) -> f64 {
    entropy(counts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn chi2_matches_longhand(obs in table()) {
        let r = chi_square_test(&ContingencyTable::from_matrix(obs.clone()).unwrap()).unwrap();
        let (stat, df) = longhand(&obs);
        prop_assert_eq!(r.df, df);
        prop_assert!((r.statistic - stat).abs() <= 1e-9 * stat.abs().max(1e-300), "{} vs {}", r.statistic, stat);
        let p = ChiSquared::new(df as f64).unwrap().sf(stat);
        prop_assert!((r.p_value - p).abs() <= 1e-9 + 1e-7 * p, "p {} vs {}", r.p_value, p);
    }

    #[test]
    fn chi2_permutation_and_scaling(obs in table(), c in 2u64..6, rot in 0usize..6) {
        let base = chi_square_test(&ContingencyTable::from_matrix(obs.clone()).unwrap()).unwrap().statistic;
        let mut permuted = obs.clone();
        let n = permuted.len();
        permuted.rotate_left(rot % n);
        for row in &mut permuted {
            row.reverse();
        }
        let p = chi_square_test(&ContingencyTable::from_matrix(permuted).unwrap()).unwrap().statistic;
        prop_assert!((p - base).abs() <= 1e-9 * base.max(1.0));
        let scaled: Vec<Vec<u64>> = obs.iter().map(|r| r.iter().map(|v| v * c).collect()).collect();
        let s = chi_square_test(&ContingencyTable::from_matrix(scaled).unwrap()).unwrap().statistic;
        prop_assert!((s - c as f64 * base).abs() <= 1e-9 * s.max(1.0));
    }

    #[test]
    fn proportional_rows_give_zero(col in prop::collection::vec(1u64..20, 2..6), mults in prop::collection::vec(1u64..5, 2..6)) {
        let obs: Vec<Vec<u64>> = mults.iter().map(|m| col.iter().map(|v| v * m).collect()).collect();
        let r = chi_square_test(&ContingencyTable::from_matrix(obs).unwrap()).unwrap();
        prop_assert!(r.statistic.abs() < 1e-9);
    }

    #[test]
    fn p_value_decreases_with_statistic(a in 0.0f64..200.0, b in 0.0f64..200.0, df in 1usize..40) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(chi2_sf(hi, df as f64) <= chi2_sf(lo, df as f64));
    }

    #[test]
    fn information_gain_identities(pairs in prop::collection::vec((0u8..5, 0u8..4), 1..200)) {
        let (x, y): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
        let ct = crosstab_codes(&x, &y).unwrap();
        let hx = h(&ct.row_totals());
        let hy = h(&ct.col_totals());
        let ig = mutual_information(&ct);
        prop_assert!((ig - (hx + hy - joint_entropy(&ct))).abs() < 1e-12);
        prop_assert!(ig >= 0.0);
        prop_assert!(ig <= hx.min(hy) + 1e-12);
        prop_assert_eq!(ig, information_gain(&x, &y).unwrap());
    }
}

#[test]
fn entropy_in_bits() {
    assert_eq!(h(&[1, 1]), 1.0);
    assert_eq!(h(&[4, 4, 4, 4]), 2.0);
    assert_eq!(h(&[7, 0]), 0.0);
    assert!(entropy(&[0, 0]).is_err());
}

#[test]
fn sf_agrees_with_reference_distribution() {
    for df in [1.0, 2.0, 5.0, 12.0, 96.0] {
        let dist = ChiSquared::new(df).unwrap();
        for x in [0.01, 0.5, 1.664, 4.0, 20.0, 80.6, 150.0] {
            assert_relative_eq!(chi2_sf(x, df), dist.sf(x), max_relative = 1e-9);
        }
    }
}

fn random_table(seed: u64, n: usize, y: &[u8]) -> Table {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(seed);
    let cols = (0..8)
        .map(|j| {
            let v: Vec<f64> = (0..n)
                .map(|i| {
                    if j < 3 && rng.gen_bool(0.7) {
                        f64::from(y[i] == j as u8)
                    } else {
                        f64::from(rng.gen_range(0..2u8))
                    }
                })
                .collect();
            (format!("f{}", 7 - j), Column::numeric_dense(v))
        })
        .collect();
    Table::new(cols).unwrap()
}

#[test]
fn full_ranking_is_sorted() {
    let y: Vec<u8> = (0..300).map(|i| (i % 3) as u8).collect();
    let mut t = random_table(5, 300, &y);
    // duplicate a column under a smaller name to force a score tie
    t = t.with_column("a_copy", t.column("f7").unwrap().clone()).unwrap();
    let n = t.n_cols();
    for scorer in [Scorer::Chi2, Scorer::MutualInfo] {
        let s = select_k_best(&t, &y, scorer, n).unwrap();
        assert_eq!(s.ranking.len(), n);
        for w in s.ranking.windows(2) {
            assert!(
                w[0].score > w[1].score || (w[0].score == w[1].score && w[0].feature < w[1].feature),
                "{:?}",
                w
            );
        }
        let names: Vec<&str> = s.ranking.iter().map(|f| f.feature.as_str()).collect();
        let a = names.iter().position(|&f| f == "a_copy").unwrap();
        assert_eq!(names[a + 1], "f7");
    }
}

#[test]
fn association_cells_match_direct_tests() {
    let y: Vec<u8> = (0..300).map(|i| (i % 3) as u8).collect();
    let t = random_table(9, 300, &y);
    let m = class_association_matrix(&t, &y, 3).unwrap();
    for (i, name) in t.names().iter().enumerate() {
        let col: Vec<u8> = t.column(name).unwrap().as_numeric().unwrap().iter().map(|v| v.unwrap() as u8).collect();
        let targets: Vec<Vec<u8>> = std::iter::once(y.clone())
            .chain((0..3).map(|c| y.iter().map(|&v| u8::from(v == c)).collect()))
            .collect();
        for (j, target) in targets.iter().enumerate() {
            let r = chi_square_test(&crosstab_codes(&col, target).unwrap()).unwrap();
            assert_relative_eq!(m.chi2[i][j], r.statistic, max_relative = 1e-12);
            assert_relative_eq!(m.p_raw[i][j], r.p_value, max_relative = 1e-12);
        }
    }
    // f7, f6, f5 carry class 0, 1, 2 signal
    assert!(m.count_associated(0) >= 3);
    assert!(m.p_raw[0][1] < 0.05 && m.p_raw[1][2] < 0.05 && m.p_raw[2][3] < 0.05);
}

#[test]
fn constant_feature_is_unassociated() {
    let y: Vec<u8> = (0..30).map(|i| (i % 3) as u8).collect();
    let t = Table::new(vec![("c".into(), Column::numeric_dense(vec![1.0; 30]))]).unwrap();
    let m = class_association_matrix(&t, &y, 3).unwrap();
    assert_eq!(m.p_masked(), vec![vec![1.0; 4]]);
}

#[test]
fn perfect_feature_is_associated_everywhere() {
    let y: Vec<u8> = (0..90).map(|i| (i % 3) as u8).collect();
    let f: Vec<f64> = y.iter().map(|&c| f64::from(c)).collect();
    let t = Table::new(vec![("p".into(), Column::numeric_dense(f))]).unwrap();
    let m = class_association_matrix(&t, &y, 3).unwrap();
    assert_eq!(m.counts(), vec![1, 1, 1, 1]);
}
