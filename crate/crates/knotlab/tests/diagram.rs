use std::collections::BTreeSet;

use knotlab::alexander::determinant;
use knotlab::diagram::{
    crowell_inequality_check, spanning_tree_count, DiagramError, DiagramRecord, ExceptionClass, PlanarMultigraph,
};
use knotlab::laurent::IntLaurentPoly;
use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Row {
    name: String,
    c: i64,
    pd: String,
    det: i64,
    alexander: String,
    alternating: bool,
    torus: String,
    twist: bool,
}

fn table() -> Vec<Row> {
    let mut rdr = csv::Reader::from_path(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/knots_le10.csv")).unwrap();
    let h = rdr.headers().unwrap().clone();
    let col = |n: &str| h.iter().position(|x| x == n).unwrap();
    let (name, c, pd, det, alex, alt, torus, twist) =
        (col("name"), col("crossing_number"), col("pd"), col("determinant"), col("alexander"), col("alternating"), col("torus"), col("twist"));
    rdr.records()
        .map(|r| r.unwrap())
        .map(|r| Row {
            name: r[name].to_string(),
            c: r[c].parse().unwrap(),
            pd: r[pd].to_string(),
            det: r[det].parse().unwrap(),
            alexander: r[alex].to_string(),
            alternating: &r[alt] == "true",
            torus: r[torus].to_string(),
            twist: &r[twist] == "true",
        })
        .collect()
}

fn trees(g: &PlanarMultigraph) -> BigInt {
    match spanning_tree_count(g) {
        Ok(n) => n,
        Err(DiagramError::Disconnected) => BigInt::zero(),
        Err(e) => panic!("{e}"),
    }
}

/// Counts spanning trees by checking every `(b - 1)`-subset of edges with union-find.
fn brute_force_trees(g: &PlanarMultigraph) -> u64 {
    let (b, m) = (g.vertices, g.edges.len());
    if b == 1 {
        return 1;
    }
    let mut count = 0;
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != b - 1 {
            continue;
        }
        let mut parent: Vec<usize> = (0..b).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        let mut acyclic = true;
        for (i, &(u, v)) in g.edges.iter().enumerate() {
            if mask & (1 << i) != 0 {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru == rv {
                    acyclic = false;
                    break;
                }
                parent[ru] = rv;
            }
        }
        count += acyclic as u64;
    }
    count
}

fn random_multigraph(rng: &mut impl Rng) -> PlanarMultigraph {
    let b = rng.random_range(1..=5);
    let m = rng.random_range(0..=9);
    let edges = (0..m).map(|_| (rng.random_range(0..b), rng.random_range(0..b))).collect();
    PlanarMultigraph { vertices: b, edges, faces: 0 }
}

#[test]
fn deletion_contraction_on_random_multigraphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let mut nontrivial = 0;
    for _ in 0..500 {
        let g = random_multigraph(&mut rng);
        let t = trees(&g);
        assert_eq!(t, BigInt::from(brute_force_trees(&g)), "{g:?}");
        if let Some(i) = g.edges.iter().position(|&(u, v)| u != v) {
            assert_eq!(t, trees(&g.delete_edge(i)) + trees(&g.contract_edge(i)), "{g:?}");
            nontrivial += 1;
        }
        if let Some(i) = g.edges.iter().position(|&(u, v)| u == v) {
            assert_eq!(t, trees(&g.delete_edge(i)));
        }
    }
    assert!(nontrivial > 300);
}

#[test]
fn small_graph_counts() {
    let tri = PlanarMultigraph { vertices: 3, edges: vec![(0, 1), (1, 2), (2, 0)], faces: 2 };
    assert_eq!(spanning_tree_count(&tri).unwrap(), BigInt::from(3));
    for a in 1..=50usize {
        assert_eq!(spanning_tree_count(&PlanarMultigraph::theta(1, 1, a)).unwrap(), BigInt::from(1 + 2 * a));
    }
    let (e1, e2, e3) = (2usize, 3usize, 4usize);
    assert_eq!(spanning_tree_count(&PlanarMultigraph::theta(e1, e2, e3)).unwrap(), BigInt::from(e1 * e2 + e2 * e3 + e3 * e1));
    let split = PlanarMultigraph { vertices: 2, edges: vec![], faces: 1 };
    assert_eq!(spanning_tree_count(&split), Err(DiagramError::Disconnected));
}

#[test]
fn trefoil_and_figure_eight_graphs() {
    let tref = DiagramRecord::parse_pd("PD[X[1,5,2,4],X[3,1,4,6],X[5,3,6,2]]").unwrap();
    let (a, b) = tref.both_graphs().unwrap();
    assert_eq!(BTreeSet::from([a.vertices, b.vertices]), BTreeSet::from([2, 3]));
    assert_eq!(a.vertices + b.vertices, 5);
    let g = tref.black_graph().unwrap();
    assert_eq!(spanning_tree_count(&g).unwrap(), determinant(&IntLaurentPoly::parse("t-1+t^-1").unwrap()));

    let fig8 = DiagramRecord::parse_pd("[[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]]").unwrap();
    let (a, b) = fig8.both_graphs().unwrap();
    assert_eq!(a.vertices + b.vertices, 6);
    assert_eq!(spanning_tree_count(&a).unwrap(), BigInt::from(5));

    // the same trefoil from a Gauss code
    let g = DiagramRecord::parse_gauss("1,-2,3,-1,2,-3", "+++").unwrap().black_graph().unwrap();
    assert_eq!(spanning_tree_count(&g).unwrap(), BigInt::from(3));
}

#[test]
fn bad_codes_are_rejected() {
    assert!(matches!(DiagramRecord::parse_pd("PD[X[1,5,2,4],X[3,1,4,6],X[5,3,6,7]]"), Err(DiagramError::Parse { .. })));
    assert!(matches!(DiagramRecord::parse_pd("PD[X[1,5,2,4];Q]"), Err(DiagramError::Parse { .. })));
    let nonalt = table().into_iter().find(|r| r.name == "8_19").unwrap();
    assert_eq!(DiagramRecord::parse_pd(&nonalt.pd).unwrap().black_graph(), Err(DiagramError::NotAlternating));
}

#[test]
fn twist_knots_give_theta_graphs() {
    for r in table().iter().filter(|r| r.twist && r.c >= 5) {
        let (a, b) = DiagramRecord::parse_pd(&r.pd).unwrap().both_graphs().unwrap();
        let theta = [a, b].into_iter().find_map(|g| g.theta_multiplicities()).unwrap_or_else(|| panic!("{}", r.name));
        let [e1, e2, e3] = theta;
        assert_eq!((e1, e2), (1, 1), "{}: {theta:?}", r.name);
        assert_eq!(1 + 2 * e3 as i64, r.det, "{}", r.name);
    }
}

#[test]
fn tree_counts_match_determinants() {
    let mut checked = 0;
    for r in table().iter().filter(|r| r.alternating) {
        let d = DiagramRecord::parse_pd(&r.pd).unwrap();
        let (a, b) = d.both_graphs().unwrap();
        assert_eq!(a.vertices + b.vertices, r.c as usize + 2, "{}", r.name);
        for g in [&a, &b] {
            assert_eq!(g.edges.len(), r.c as usize);
            assert_eq!(g.vertices + g.faces, g.edges.len() + 2, "{}", r.name);
        }
        let ta = spanning_tree_count(&a).unwrap();
        assert_eq!(ta, spanning_tree_count(&b).unwrap(), "{}", r.name);
        let det = determinant(&IntLaurentPoly::parse(&r.alexander).unwrap());
        assert_eq!(det, BigInt::from(r.det));
        if r.c <= 9 {
            assert_eq!(ta, det, "{}", r.name);
            checked += 1;
        }
    }
    assert_eq!(checked, 73);
}

fn class(r: &Row) -> ExceptionClass {
    if r.torus.starts_with("2:") || r.torus.ends_with(":2") {
        ExceptionClass::Torus2
    } else if r.twist {
        ExceptionClass::Twist
    } else {
        ExceptionClass::Other
    }
}

#[test]
fn crowell_examples() {
    let v = crowell_inequality_check(11, 6, ExceptionClass::Other);
    assert!(v.three_c_bound && !v.two_c_bound && !v.two_c_violation_unexplained);
    let v = crowell_inequality_check(13, 7, ExceptionClass::Other);
    assert!(v.three_c_bound && !v.two_c_bound && !v.two_c_violation_unexplained);
    let v = crowell_inequality_check(7, 7, ExceptionClass::Torus2);
    assert!(!v.three_c_bound && !v.three_c_violation && !v.three_c_required);
    let v = crowell_inequality_check(7, 7, ExceptionClass::Other);
    assert!(v.three_c_violation && v.two_c_violation_unexplained);
}

#[test]
fn crowell_corpus_scan() {
    let mut below_2c = BTreeSet::new();
    for r in table().iter().filter(|r| r.alternating && r.c <= 9) {
        let v = crowell_inequality_check(r.det, r.c, class(r));
        assert!(!v.three_c_violation, "{} violates det >= 3c - 8", r.name);
        assert!(!v.two_c_violation_unexplained, "{}", r.name);
        if !v.two_c_bound {
            below_2c.insert(r.name.clone());
        }
    }
    assert!(below_2c.contains("6_2") && below_2c.contains("7_3") && below_2c.contains("3_1"));
}
