use mortband::metrics::{
    binarize, classification_report, cohen_kappa, confusion_matrix, kappa_from_counts,
    micro_average_roc, roc_curve, AgreementBand, ConfusionMatrix,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

/// Fraction of (positive, negative) pairs ordered correctly, ties worth ½.
fn concordance(y: &[u8], s: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..y.len() {
        for j in 0..y.len() {
            if y[i] == 1 && y[j] == 0 {
                den += 1.0;
                if s[i] > s[j] {
                    num += 1.0;
                } else if s[i] == s[j] {
                    num += 0.5;
                }
            }
        }
    }
    num / den
}

fn scored() -> impl Strategy<Value = (Vec<u8>, Vec<f64>)> {
    prop::collection::vec((0u8..2, 0u8..12), 2..80)
        .prop_filter("both classes", |v| v.iter().any(|p| p.0 == 0) && v.iter().any(|p| p.0 == 1))
        // coarse scores so ties happen
        .prop_map(|v| v.into_iter().map(|(y, s)| (y, f64::from(s) / 4.0)).unzip())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn auc_is_concordance((y, s) in scored()) {
        let r = roc_curve(&y, &s).unwrap();
        prop_assert!((r.auc - concordance(&y, &s)).abs() < 1e-12);
        prop_assert!(r.fpr.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(r.tpr.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!((*r.fpr.last().unwrap(), *r.tpr.last().unwrap()), (1.0, 1.0));
    }

    #[test]
    fn roc_ignores_monotone_transforms((y, s) in scored(), a in 0.1f64..5.0, b in -3.0f64..3.0) {
        let r = roc_curve(&y, &s).unwrap();
        let t: Vec<f64> = s.iter().map(|v| (a * v + b).exp()).collect();
        let q = roc_curve(&y, &t).unwrap();
        prop_assert_eq!(&r.fpr, &q.fpr);
        prop_assert_eq!(&r.tpr, &q.tpr);
        prop_assert!((r.auc - q.auc).abs() < 1e-15);
    }

    #[test]
    fn kappa_symmetry(pairs in prop::collection::vec((0u8..3, 0u8..3), 1..200)) {
        let (a, b): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
        let ab = cohen_kappa(&a, &b).unwrap();
        let ba = cohen_kappa(&b, &a).unwrap();
        prop_assert!((ab.kappa - ba.kappa).abs() < 1e-12);
        prop_assert!(ab.kappa <= 1.0 + 1e-12 && ab.kappa >= -1.0 - 1e-12);
        prop_assert_eq!(cohen_kappa(&a, &a).unwrap().kappa, 1.0);
    }

    #[test]
    fn weighted_recall_is_accuracy(counts in prop::collection::vec(prop::collection::vec(0u64..50, 3), 3)) {
        prop_assume!(counts.iter().flatten().sum::<u64>() > 0);
        let cm = ConfusionMatrix::from_counts(counts).unwrap();
        let r = classification_report(&cm).unwrap();
        let support: u64 = r.classes.iter().map(|c| c.support).sum();
        let weighted: f64 = r.classes.iter().map(|c| c.support as f64 * c.recall).sum::<f64>() / support as f64;
        prop_assert!((weighted - r.accuracy).abs() < 1e-12);
        prop_assert!((r.weighted_avg.recall - r.accuracy).abs() < 1e-12);
    }
}

#[test]
fn micro_average_pools_pairs() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
    let y: Vec<u8> = (0..60).map(|_| rng.gen_range(0..3)).collect();
    let scores: Vec<Vec<f64>> = (0..3)
        .map(|_| (0..60).map(|_| f64::from(rng.gen_range(0..20u8))).collect())
        .collect();
    let truths: Vec<Vec<u8>> = (0..3).map(|c| binarize(&y, c)).collect();
    let micro = micro_average_roc(&truths, &scores).unwrap();
    assert!((micro.auc - concordance(&truths.concat(), &scores.concat())).abs() < 1e-12);

    let same = micro_average_roc(&[truths[0].clone(), truths[0].clone()], &[scores[0].clone(), scores[0].clone()]).unwrap();
    let single = roc_curve(&truths[0], &scores[0]).unwrap();
    assert_eq!(same.fpr, single.fpr);
    assert_eq!(same.tpr, single.tpr);
}

#[test]
fn kappa_hand_example() {
    let k = cohen_kappa(&[0, 1, 2, 0], &[0, 2, 2, 0]).unwrap();
    assert!((k.po - 0.75).abs() < 1e-15);
    assert!((k.pe - 0.375).abs() < 1e-15);
    assert!((k.kappa - 0.6).abs() < 1e-12);
    assert_eq!(k.band, AgreementBand::Moderate);
}

#[test]
fn kappa_of_independent_labelings_is_small() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(10);
    let a: Vec<u8> = (0..10_000).map(|_| rng.gen_range(0..3)).collect();
    let b: Vec<u8> = (0..10_000).map(|_| rng.gen_range(0..3)).collect();
    assert!(cohen_kappa(&a, &b).unwrap().kappa.abs() < 0.1);
}

#[test]
fn kappa_and_accuracy_of_reference_matrices() {
    // rows actual, columns predicted
    let lr_chi2 = vec![
        vec![8909, 3622, 3517],
        vec![7732, 6644, 8362],
        vec![3323, 5300, 20226],
    ];
    let k = kappa_from_counts(&lr_chi2).unwrap();
    assert!((k.kappa - 0.2755).abs() < 5e-4, "{}", k.kappa);
    assert_eq!(k.band, AgreementBand::Fair);

    // printed with predicted rows; transpose to actual rows
    let lasso_pred_rows = [[8934u64, 7805, 3362], [3461, 6347, 4992], [3653, 8586, 20495]];
    let actual_rows: Vec<Vec<u64>> = (0..3).map(|a| (0..3).map(|p| lasso_pred_rows[p][a]).collect()).collect();
    let cm = ConfusionMatrix::from_counts(actual_rows).unwrap();
    assert_eq!(cm.total(), 67_635);
    assert_eq!((0..3).map(|c| cm.row_total(c)).collect::<Vec<_>>(), vec![16_048, 22_738, 28_849]);
    assert!((cm.accuracy() - 0.5290).abs() < 1e-4, "{}", cm.accuracy());
}

#[test]
fn confusion_from_labels_and_zero_division() {
    let cm = confusion_matrix(&[0, 0, 1, 2], &[0, 1, 1, 1], 3).unwrap();
    assert_eq!(cm.counts, vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 1, 0]]);
    let r = classification_report(&cm).unwrap();
    assert!(r.classes[2].zero_division);
    assert_eq!(r.classes[2].precision, 0.0);
    assert!((r.accuracy - 0.5).abs() < 1e-15);
}
