use knotlab::apoly::{
    binomial_irreducibility, boundary_slopes_from_sides, cyclotomic_of_binomial, divides_binomial, edge_divisible_by,
    edge_polynomial, minkowski_sum, newton_polygon, ApolyError, BivLaurentPoly, NewtonPolygon, RootOfUnity,
};
use knotlab::laurent::{cyclotomic, cyclotomic_factor_split, cyclotomic_product_test, IntLaurentPoly};
use knotlab::slopes::Slope;
use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;

fn poly(terms: &[(i64, i64, i64)]) -> BivLaurentPoly {
    BivLaurentPoly::from_i64(terms)
}

fn np(vs: &[(i64, i64)]) -> NewtonPolygon {
    NewtonPolygon::from_points(vs)
}

#[test]
fn polygon_examples() {
    assert_eq!(newton_polygon(&poly(&[(3, 2, 1), (0, 0, -5)])).unwrap(), np(&[(0, 0), (3, 2)]));
    assert_eq!(newton_polygon(&poly(&[(0, 0, 1), (6, 1, 1)])).unwrap().vertices, vec![(0, 0), (6, 1)]);
    assert!(newton_polygon(&poly(&[(0, 0, 5)])).unwrap().is_point());
    assert_eq!(newton_polygon(&BivLaurentPoly::zero()), Err(ApolyError::ZeroPolynomial));
}

#[test]
fn minkowski_examples() {
    let square = minkowski_sum(&np(&[(0, 0), (1, 0)]), &np(&[(0, 0), (0, 1)]));
    assert_eq!(square, np(&[(0, 0), (1, 0), (1, 1), (0, 1)]));
    assert_eq!(square.vertices.len(), 4);
    let tri = np(&[(0, 0), (3, 1), (1, 4)]);
    assert_eq!(minkowski_sum(&tri, &np(&[(2, -1)])), np(&[(2, -1), (5, 0), (3, 3)]));
}

#[test]
fn binomial_irreducibility_examples() {
    assert!(binomial_irreducibility(6, 1));
    assert!(!binomial_irreducibility(2, 4));
    assert!(binomial_irreducibility(0, 1));
}

#[test]
fn boundary_slope_examples() {
    let tref = newton_polygon(&poly(&[(0, 0, 1), (6, 1, 1)])).unwrap();
    assert_eq!(boundary_slopes_from_sides(&tref).unwrap(), vec![Slope::integer(6)]);
    let square = np(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
    assert_eq!(boundary_slopes_from_sides(&square).unwrap(), vec![Slope::integer(0), Slope::INFINITY]);
    for (p, q) in [(3, 2), (-5, 3), (7, 4)] {
        assert_eq!(boundary_slopes_from_sides(&np(&[(0, 0), (p, q)])).unwrap(), vec![Slope::new(p, q).unwrap()]);
    }
    assert_eq!(boundary_slopes_from_sides(&np(&[(1, 1)])), Err(ApolyError::DegeneratePoint));
}

#[test]
fn edge_polynomial_examples() {
    let f = poly(&[(6, 1, 1), (0, 0, 1)]);
    let side = newton_polygon(&f).unwrap().sides()[0];
    assert_eq!(edge_polynomial(&f, &side).unwrap(), IntLaurentPoly::parse("z^6+1").unwrap());
    let g = poly(&[(4, 2, 1), (0, 0, -1)]);
    let side = newton_polygon(&g).unwrap().sides()[0];
    assert_eq!(edge_polynomial(&g, &side).unwrap(), IntLaurentPoly::parse("z^4-1").unwrap());
    let other = newton_polygon(&poly(&[(0, 0, 1), (1, 3, 1)])).unwrap().sides()[0];
    assert!(matches!(edge_polynomial(&f, &other), Err(ApolyError::SideNotOnPolygon(..))));
}

#[test]
fn cyclotomic_product_examples() {
    let z6 = IntLaurentPoly::parse("z^6+1").unwrap();
    assert!(cyclotomic_product_test(&z6));
    let (idx, _) = cyclotomic_factor_split(&z6);
    assert_eq!(idx, vec![4, 12]);
    let back = idx.iter().fold(IntLaurentPoly::one(), |acc, n| &acc * &cyclotomic(*n));
    assert_eq!(back, z6);
    assert!(!cyclotomic_product_test(&IntLaurentPoly::parse("z-3").unwrap()));
    for p in 1..=20 {
        let f = &IntLaurentPoly::monomial(1, p) - &IntLaurentPoly::one();
        assert!(cyclotomic_product_test(&f), "z^{p} - 1");
    }
}

#[test]
fn divisibility_examples() {
    let a = poly(&[(6, 1, 1), (0, 0, 1)]);
    assert!(divides_binomial(&a, 6, 1, RootOfUnity::minus_one()).unwrap());
    assert!(!divides_binomial(&a, 6, 1, RootOfUnity::one()).unwrap());
    assert_eq!(divides_binomial(&a, 2, 4, RootOfUnity::one()), Err(ApolyError::NotCoprime(2, 4)));
    // (M^2 L^3 + 1)(L + M) with omega = -1
    let b = poly(&[(2, 3, 1), (0, 0, 1)]).mul(&poly(&[(0, 1, 1), (1, 0, 1)]));
    assert!(divides_binomial(&b, 2, 3, RootOfUnity::minus_one()).unwrap());
    // Phi_3(M^2 L^3) (L + M) for both primitive cube roots
    let c = cyclotomic_of_binomial(3, 2, 3).mul(&poly(&[(0, 1, 1), (1, 0, 1)]));
    for k in [1, 2] {
        assert!(divides_binomial(&c, 2, 3, RootOfUnity::new(3, k).unwrap()).unwrap());
    }
    assert!(!divides_binomial(&c, 2, 3, RootOfUnity::minus_one()).unwrap());
}

#[test]
fn roots_of_unity_are_reduced() {
    assert_eq!(RootOfUnity::new(12, 8).unwrap(), RootOfUnity::new(3, 2).unwrap());
    assert_eq!(RootOfUnity::new(4, -1).unwrap(), RootOfUnity { order: 4, power: 3 });
    assert_eq!(RootOfUnity::new(5, 10).unwrap(), RootOfUnity::one());
    assert!(RootOfUnity::new(0, 1).is_err());
}

fn small_poly() -> impl Strategy<Value = BivLaurentPoly> {
    prop::collection::vec(((-3i64..=3, -3i64..=3), -4i64..=4), 1..6).prop_map(|ts| {
        let mut f = BivLaurentPoly::zero();
        for ((m, l), c) in ts {
            f.add_term((m, l), BigInt::from(c));
        }
        if f.is_zero() {
            f = poly(&[(0, 0, 1)]);
        }
        f
    })
}

fn coprime_pair() -> impl Strategy<Value = (i64, i64)> {
    (-6i64..=6, 0i64..=4).prop_filter("coprime", |(p, q)| p.gcd(q) == 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn newton_polygon_of_product_is_minkowski_sum(f in small_poly(), g in small_poly()) {
        let fg = f.mul(&g);
        prop_assert_eq!(
            newton_polygon(&fg).unwrap(),
            minkowski_sum(&newton_polygon(&f).unwrap(), &newton_polygon(&g).unwrap())
        );
    }

    #[test]
    fn product_slopes_contain_factor_slopes(f in small_poly(), g in small_poly()) {
        let all = |x: &BivLaurentPoly| boundary_slopes_from_sides(&newton_polygon(x).unwrap()).unwrap_or_default();
        let fg = all(&f.mul(&g));
        for s in all(&f).into_iter().chain(all(&g)) {
            prop_assert!(fg.contains(&s), "{} missing from {:?}", s, fg);
        }
    }

    #[test]
    fn constructed_products_divide(n in 1i64..=12, (p, q) in coprime_pair(), g in small_poly(), bump in (-3i64..=3, -3i64..=3)) {
        let a = cyclotomic_of_binomial(n, p, q).mul(&g);
        let primitive: Vec<i64> = (0..n.max(1)).filter(|k| k.gcd(&n) == 1).collect();
        for &k in &primitive {
            let w = RootOfUnity::new(n, k).unwrap();
            prop_assert!(divides_binomial(&a, p, q, w).unwrap());
        }
        let mut perturbed = a.clone();
        perturbed.add_term(bump, BigInt::from(1));
        let w = RootOfUnity::new(n, primitive[0]).unwrap();
        prop_assert!(!divides_binomial(&perturbed, p, q, w).unwrap());
    }

    #[test]
    fn certified_sides_carry_the_root(n in 2i64..=8, (p, q) in coprime_pair(), g in small_poly()) {
        prop_assume!(p != 0);
        let a = cyclotomic_of_binomial(n, p, q).mul(&g);
        let w = RootOfUnity::new(n, 1).unwrap();
        prop_assert!(divides_binomial(&a, p, q, w).unwrap());
        let poly = newton_polygon(&a).unwrap();
        for side in poly.sides() {
            if side.dir == (p, q) || side.dir == (-p, -q) {
                let theta = edge_polynomial(&a, &side).unwrap();
                prop_assert!(edge_divisible_by(&theta, p, w), "side {:?}: {}", side, theta);
            }
        }
    }

    #[test]
    fn edge_polynomials_multiply(a0 in 1i64..=3, a1 in -3i64..=3, b0 in 1i64..=3, b1 in -3i64..=3, c in prop::collection::vec(-2i64..=2, 2)) {
        prop_assume!(a1 != 0 && b1 != 0);
        // f and g have bottom sides along the direction (1, 0) and one term above
        let f = poly(&[(0, 0, a0), (1, 0, a1), (0, 2, c[0].max(1))]);
        let g = poly(&[(0, 0, b0), (2, 0, b1), (1, 1, c[1].max(1))]);
        let bottom = |x: &BivLaurentPoly| {
            let s = newton_polygon(x).unwrap().sides().into_iter().find(|s| s.dir == (1, 0)).unwrap();
            edge_polynomial(x, &s).unwrap()
        };
        prop_assert_eq!(bottom(&f.mul(&g)), &bottom(&f) * &bottom(&g));
    }
}
