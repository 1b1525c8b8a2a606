use std::collections::HashMap;

use mortband::tabular::{read_csv_from_reader, write_csv_to_writer, Column, ColumnKind, Table};
use proptest::prelude::*;

fn column(n: usize) -> impl Strategy<Value = Column> {
    prop_oneof![
        prop::collection::vec(prop::option::weighted(0.8, -1e6f64..1e6), n)
            .prop_filter("some value", |v| v.iter().any(Option::is_some))
            .prop_map(Column::numeric),
        prop::collection::vec(prop::option::weighted(0.8, "[A-Za-z][A-Za-z0-9 ,\"]{0,6}[A-Za-z]"), n)
            .prop_filter("some value", |v| v.iter().any(Option::is_some))
            .prop_map(Column::categorical),
    ]
}

fn table() -> impl Strategy<Value = Table> {
    (1usize..6, 1usize..25).prop_flat_map(|(c, n)| {
        prop::collection::vec(column(n), c).prop_map(|cols| {
            Table::new(cols.into_iter().enumerate().map(|(i, c)| (format!("c{i}"), c)).collect()).unwrap()
        })
    })
}

/// Small categorical tables with many repeated rows.
fn dup_table() -> impl Strategy<Value = Table> {
    (1usize..4, 1usize..40).prop_flat_map(|(c, n)| {
        prop::collection::vec(prop::collection::vec(prop::option::of("[ab]"), n), c).prop_map(|cols| {
            Table::new(
                cols.into_iter()
                    .enumerate()
                    .map(|(i, v)| (format!("c{i}"), Column::categorical(v)))
                    .collect(),
            )
            .unwrap()
        })
    })
}

fn round_trip(t: &Table) -> Table {
    let mut buf = Vec::new();
    write_csv_to_writer(t, &mut buf).unwrap();
    read_csv_from_reader(buf.as_slice(), None).unwrap()
}

fn row_multiset(t: &Table) -> HashMap<Vec<Option<String>>, usize> {
    let mut m = HashMap::new();
    for r in 0..t.n_rows() {
        *m.entry(t.row(r)).or_default() += 1;
    }
    m
}

proptest! {
    #[test]
    fn csv_round_trip(t in table()) {
        let back = round_trip(&t);
        prop_assert_eq!(back.names(), t.names());
        for (name, col) in t.columns() {
            let other = back.column(name).unwrap();
            prop_assert_eq!(other.kind(), col.kind());
            for r in 0..t.n_rows() {
                match (col, other) {
                    (Column::Numeric(a), Column::Numeric(b)) => prop_assert_eq!(a[r], b[r]),
                    _ => prop_assert_eq!(col.render(r), other.render(r)),
                }
            }
        }
    }

    #[test]
    fn dedup_properties(t in dup_table()) {
        let d = t.deduplicate_keep_last();
        prop_assert_eq!(&d.deduplicate_keep_last(), &d);
        let input = row_multiset(&t);
        let output = row_multiset(&d);
        prop_assert!(output.values().all(|&c| c == 1));
        prop_assert!(output.keys().all(|k| input.contains_key(k)));
        prop_assert_eq!(output.len(), input.len());
    }

    #[test]
    fn missing_summary_consistent(t in table()) {
        let s = t.missing_summary();
        for (name, col) in t.columns() {
            let e = s.get(name).unwrap();
            prop_assert!(e.missing <= e.total);
            let present = (0..t.n_rows()).filter(|&r| !col.is_missing(r)).count();
            prop_assert_eq!(e.total - e.missing, present);
        }
    }

    #[test]
    fn drop_and_fill_commute(t in dup_table()) {
        prop_assume!(t.n_cols() >= 2);
        let names = t.names().to_vec();
        let (first, rest) = names.split_first().unwrap();
        let a = t.drop_columns(&[first]).unwrap().fill_missing_with_label(rest, "Missing").unwrap();
        let b = t.fill_missing_with_label(rest, "Missing").unwrap().drop_columns(&[first]).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn csv_output_is_stable_and_blank_for_missing() {
    let t = Table::new(vec![
        ("n".into(), Column::numeric([Some(1.5), None, Some(-2.0)])),
        ("c".into(), Column::categorical([Some("x, y"), Some("z"), None])),
    ])
    .unwrap();
    let write = || {
        let mut buf = Vec::new();
        write_csv_to_writer(&t, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    };
    let s = write();
    assert_eq!(s, write());
    assert_eq!(s, "n,c\n1.5,\"x, y\"\n,z\n-2,\n");
    let back = round_trip(&t);
    assert_eq!(back.column("n").unwrap().kind(), ColumnKind::Numeric);
    assert_eq!(back, t);
}

#[test]
fn any_text_token_makes_a_column_categorical() {
    let t = read_csv_from_reader("a,b\n1,2\nx,3\n".as_bytes(), None).unwrap();
    assert_eq!(t.column("a").unwrap().kind(), ColumnKind::Categorical);
    assert_eq!(t.column("b").unwrap().kind(), ColumnKind::Numeric);
}
