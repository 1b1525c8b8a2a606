//! Published cross-tabulations of the training split against the target,
//! recomputed from their printed counts.

use mortband::stats::{chi_square_test, ContingencyTable};

struct Fixture {
    name: &'static str,
    rows: &'static [[u64; 3]],
    statistic: f64,
    df: usize,
    min_expected: Option<f64>,
}

const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "PRIORITY",
        rows: &[
            [5378, 6712, 7388],
            [1940, 2483, 3232],
            [3682, 5154, 6226],
            [2213, 1643, 735],
            [20007, 26965, 30445],
            [172, 245, 395],
            [1587, 2482, 3511],
            [13152, 22514, 34573],
            [11, 16, 44],
        ],
        statistic: 4139.033,
        df: 16,
        min_expected: Some(16.85),
    },
    Fixture {
        name: "MARRIED",
        rows: &[[30925, 42939, 58089], [7860, 10622, 13294], [9357, 14653, 15166]],
        statistic: 437.131,
        df: 4,
        min_expected: Some(7539.29),
    },
    Fixture {
        name: "SEX",
        rows: &[[540, 783, 1035], [47602, 67431, 85514]],
        statistic: 1.664,
        df: 2,
        min_expected: Some(559.47),
    },
    Fixture {
        name: "RACE",
        rows: &[[4833, 6381, 9569], [1443, 2048, 2928], [41866, 59785, 74052]],
        statistic: 153.508,
        df: 4,
        min_expected: Some(1523.00),
    },
    Fixture {
        name: "SERUMALB_RANGE",
        rows: &[[4358, 3250, 1858], [30271, 44241, 57010], [13513, 20723, 27681]],
        statistic: 3362.954,
        df: 4,
        min_expected: None,
    },
    Fixture {
        name: "FRAILTY_GROUP",
        rows: &[[5952, 8443, 11459], [14848, 22132, 33319], [27342, 37639, 41771]],
        statistic: 1252.936,
        df: 4,
        min_expected: None,
    },
    Fixture {
        name: "AGE_GROUP",
        rows: &[
            [646, 372, 41],
            [4828, 8660, 22880],
            [11394, 18724, 33081],
            [13479, 20046, 20631],
            [12772, 16097, 8749],
            [5023, 4315, 1167],
        ],
        statistic: 21354.703,
        df: 10,
        min_expected: None,
    },
    Fixture {
        name: "DIASTOLIC_RANGE",
        rows: &[[43955, 60856, 74150], [353, 637, 956], [3834, 6721, 11443]],
        statistic: 1049.617,
        df: 4,
        min_expected: None,
    },
    Fixture {
        name: "SYSTOLIC_RANGE",
        rows: &[
            [5174, 5809, 6827],
            [234, 296, 242],
            [9510, 12900, 17791],
            [14105, 20697, 28361],
            [19119, 28512, 33328],
        ],
        statistic: 634.945,
        df: 8,
        min_expected: None,
    },
    Fixture {
        name: "N_IP_RANGE",
        rows: &[[5617, 4336, 2722], [42525, 63878, 83827]],
        statistic: 3838.680,
        df: 2,
        min_expected: None,
    },
    Fixture {
        name: "N_OP_RANGE",
        rows: &[[22099, 24355, 23749], [366, 837, 1244], [25677, 43022, 61556]],
        statistic: 4747.159,
        df: 4,
        min_expected: None,
    },
    Fixture {
        name: "BMI_RANGE",
        rows: &[
            [169, 108, 71],
            [189, 229, 195],
            [8762, 9753, 9094],
            [37214, 55369, 74059],
            [1808, 2755, 3130],
        ],
        statistic: 1832.751,
        df: 8,
        min_expected: None,
    },
    Fixture {
        name: "A1C_RANGE",
        rows: &[[37784, 55610, 73305], [3868, 4487, 4428], [6490, 8117, 8816]],
        statistic: 883.335,
        df: 4,
        min_expected: None,
    },
    Fixture {
        name: "SERUMCRE_RANGE",
        rows: &[
            [32937, 51841, 73884],
            [1068, 579, 182],
            [12303, 12797, 8636],
            [1834, 2997, 3847],
        ],
        statistic: 7415.854,
        df: 6,
        min_expected: Some(433.96),
    },
    Fixture {
        name: "HDL_RANGE",
        rows: &[
            [25737, 35270, 41979],
            [2532, 3477, 4525],
            [18437, 27420, 37876],
            [1436, 2047, 2169],
        ],
        statistic: 464.621,
        df: 6,
        min_expected: None,
    },
    Fixture {
        name: "LDL_RANGE",
        rows: &[
            [30263, 42320, 51680],
            [75, 98, 126],
            [11526, 16615, 23339],
            [2750, 3965, 5345],
            [512, 700, 941],
            [3016, 4516, 5118],
        ],
        statistic: 260.499,
        df: 10,
        min_expected: None,
    },
    Fixture {
        name: "TRI_RANGE",
        rows: &[
            [25632, 35626, 46302],
            [11858, 17117, 20718],
            [9327, 13534, 17478],
            [1325, 1937, 2051],
        ],
        statistic: 80.600,
        df: 6,
        min_expected: Some(1260.58),
    },
];

fn table(rows: &[[u64; 3]]) -> ContingencyTable {
    ContingencyTable::from_matrix(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

#[test]
fn every_printed_statistic_reproduces() {
    for f in FIXTURES {
        let r = chi_square_test(&table(f.rows)).unwrap();
        assert!(
            (r.statistic - f.statistic).abs() < 0.0005 + 1e-9,
            "{}: {} vs {}",
            f.name,
            r.statistic,
            f.statistic
        );
        assert_eq!(r.df, f.df, "{}", f.name);
        if let Some(m) = f.min_expected {
            assert!((r.min_expected - m).abs() < 0.005 + 1e-9, "{}: {}", f.name, r.min_expected);
        }
    }
}

#[test]
fn every_table_covers_the_training_split() {
    for f in FIXTURES {
        let t = table(f.rows);
        assert_eq!(t.total(), 202_905, "{}", f.name);
        assert_eq!(t.col_totals(), vec![48_142, 68_214, 86_549], "{}", f.name);
    }
}

#[test]
fn sex_p_value_and_assumption() {
    let r = chi_square_test(&table(FIXTURES[2].rows)).unwrap();
    assert!((r.p_value - 0.435).abs() < 0.0005, "{}", r.p_value);
    assert!(r.assumption_ok);
    for f in FIXTURES.iter().filter(|f| f.name != "SEX") {
        assert!(chi_square_test(&table(f.rows)).unwrap().p_value < 0.001, "{}", f.name);
    }
}
