use knotlab::braid::Braid;
use knotlab::laurent::IntLaurentPoly;
use knotlab::slopes::Slope;
use knotlab_cli::table::{bundled_table, ingest_table, parse_csv, parse_json, torus_alexander, write_csv, CableDatum, SurjectionDatum};
use knotlab_cli::{KnotRecord, TableError};
use proptest::prelude::*;

#[test]
fn bundled_table_row_counts() {
    let t = bundled_table().unwrap();
    let count = |n: u32| t.iter().filter(|r| r.crossing_number == n).count();
    assert_eq!(count(9), 49);
    assert_eq!(count(10), 165);
    assert_eq!(t.len(), 249);
    let tref = t.iter().find(|r| r.name == "3_1").unwrap();
    assert_eq!(tref.torus, Some((2, 3)));
    assert_eq!(tref.boundary_slopes, Some(vec![Slope::integer(0), Slope::integer(6)]));
    assert_eq!(tref.braid, Some(Braid::from_word(vec![1, 1, 1]).unwrap()));
    let k = t.iter().find(|r| r.name == "10_98").unwrap();
    assert_eq!(k.surjection, Some(SurjectionDatum { target: "3_1".into(), degree: 2 }));
}

#[test]
fn torus_alexander_closed_form() {
    assert_eq!(torus_alexander(2, 3), IntLaurentPoly::parse("t-1+t^-1").unwrap());
    assert_eq!(torus_alexander(-2, 3), torus_alexander(2, 3));
    assert_eq!(torus_alexander(3, 5), IntLaurentPoly::parse("t^4-t^3+t-1+t^-1-t^-3+t^-4").unwrap());
}

#[test]
fn empty_inputs_give_empty_tables() {
    assert_eq!(parse_csv(""), Ok(vec![]));
    assert_eq!(parse_csv("name,crossing_number\n"), Ok(vec![]));
    assert_eq!(parse_json(""), Ok(vec![]));
    assert_eq!(parse_json("[]"), Ok(vec![]));
}

#[test]
fn schema_errors_carry_row_and_column() {
    let text = "name,crossing_number,signature\n3_1,3,-2\n4_1,four,0\n";
    match parse_csv(text) {
        Err(TableError::Schema { row, column, .. }) => assert_eq!((row, column.as_str()), (2, "crossing_number")),
        other => panic!("{other:?}"),
    }
    match parse_csv("name,crossing_number,colour\n3_1,3,red\n") {
        Err(TableError::Schema { column, .. }) => assert_eq!(column, "colour"),
        other => panic!("{other:?}"),
    }
    match parse_csv("name,crossing_number,alternating\n3_1,3,maybe\n") {
        Err(TableError::Schema { row: 1, column, .. }) => assert_eq!(column, "alternating"),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_csv("name,crossing_number\n,3\n"), Err(TableError::Schema { row: 1, .. })));
    assert!(matches!(parse_json(r#"[{"name":"3_1"}]"#), Err(TableError::Schema { row: 1, .. })));
}

#[test]
fn inconsistent_rows_are_rejected() {
    let bad = [
        "name,crossing_number,alexander,determinant\nK,3,t-1+t^-1,5\n",
        "name,crossing_number,alexander,torus\nK,3,-t+3-t^-1,2:3\n",
        "name,crossing_number,torus\nK,3,2:4\n",
        "name,crossing_number,seifert_genus,slice_genus\nK,3,1,2\n",
        "name,crossing_number,slice,slice_genus\nK,3,true,1\n",
        "name,crossing_number,cable\nK,3,3:1@3_1\n",
        "name,crossing_number,alexander\nK,3,t^2+t\n",
    ];
    for text in bad {
        assert!(matches!(parse_csv(text), Err(TableError::Consistency { row: 1, .. })), "{text}");
    }
}

#[test]
fn json_and_csv_agree() {
    let json = r#"[{"name":"3_1","crossing_number":3,"braid":[1,1,1],"alexander":"t-1+t^-1","determinant":3,
        "signature":-2,"torus":"2:3","boundary_slopes":[0,6],"alternating":true,"cable":null}]"#;
    let csv = "name,crossing_number,braid,alexander,determinant,signature,torus,boundary_slopes,alternating\n\
               3_1,3,\"1,1,1\",t-1+t^-1,3,-2,2:3,0;6,true\n";
    let a = parse_json(json).unwrap();
    assert_eq!(a, parse_csv(csv).unwrap());
    assert_eq!(a[0].boundary_slopes, Some(vec![Slope::integer(0), Slope::integer(6)]));

    let dir = std::env::temp_dir().join(format!("knotlab-tables-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("t.json");
    std::fs::write(&path, json).unwrap();
    assert_eq!(ingest_table(&path).unwrap(), a);
    std::fs::remove_dir_all(&dir).unwrap();
    assert!(matches!(ingest_table(&dir.join("missing.csv")), Err(TableError::Io { .. })));
}

#[test]
fn bundled_table_round_trips() {
    let t = bundled_table().unwrap();
    assert_eq!(parse_csv(&write_csv(&t)).unwrap(), t);
}

const POLYS: [(&str, u64); 5] =
    [("1", 1), ("t-1+t^-1", 3), ("-t+3-t^-1", 5), ("2t-3+2t^-1", 7), ("t^2-t+1-t^-1+t^-2", 5)];

fn record() -> impl Strategy<Value = KnotRecord> {
    let flags = prop::collection::vec(prop::option::of(any::<bool>()), 5);
    let slopes = prop::option::of(prop::collection::vec((-40i64..40, 1i64..5), 1..5));
    (
        ("[0-9]{1,2}_[0-9a-z]{1,3}", 3u32..14),
        (prop::option::of(0..POLYS.len()), any::<bool>(), prop::option::of(-10i64..10)),
        (prop::option::of((0u32..4, 0u32..3)), flags, prop::option::of(1u32..5)),
        (slopes, prop::option::of(prop::collection::vec(prop::sample::select(vec![-3i32, -2, -1, 1, 2, 3]), 1..8))),
        (prop::option::of((1i64..30, 2i64..6)), prop::option::of(1i64..5), prop::option::of("[a-z]{1,8}")),
    )
        .prop_map(|((name, c), (poly, with_det, sig), (genus, f, tangles), (slopes, braid), (cable, degree, chir))| {
            let (alexander, determinant) = match poly {
                Some(i) => (Some(IntLaurentPoly::parse(POLYS[i].0).unwrap()), with_det.then_some(POLYS[i].1)),
                None => (None, None),
            };
            let (seifert_genus, slice_genus) = match genus {
                Some((g, d)) => (Some(g + d), Some(g)),
                None => (None, None),
            };
            KnotRecord {
                name,
                crossing_number: c,
                braid: braid.map(|w| Braid::from_word(w).unwrap()),
                alexander,
                determinant,
                signature: sig,
                seifert_genus,
                slice_genus,
                alternating: f[0],
                amphichiral: f[1],
                small: f[2],
                twist: f[3],
                composite: f[4],
                montesinos_tangles: tangles,
                boundary_slopes: slopes.map(|v| v.into_iter().map(|(m, n)| Slope::new(m, n).unwrap()).collect()),
                cable: cable.filter(|(p, q)| num_integer::gcd(*p, *q) == 1).map(|(p, q)| CableDatum { p, q, companion: "3_1".into() }),
                surjection: degree.map(|degree| SurjectionDatum { target: "3_1".into(), degree }),
                chirality: chir,
                ..Default::default()
            }
        })
}

proptest! {
    #[test]
    fn csv_round_trip(recs in prop::collection::vec(record(), 0..6)) {
        let text = write_csv(&recs);
        prop_assert_eq!(parse_csv(&text).unwrap(), recs);
    }
}
