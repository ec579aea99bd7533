use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI, TAU};

use knotlab::pillowcase::{
    central_twist, circle_dist, iota_canonicalize, lift_path, mirror_image, pillowcase_coords, Arc, ImagePoint,
    PillowcaseError, PillowcaseImage, PillowcasePoint,
};
use knotlab::Su2;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn close(p: PillowcasePoint, a: f64, b: f64) -> bool {
    (p.alpha - a).abs() < 1e-9 && circle_dist(p.beta, b) < 1e-9
}

fn random_unit(rng: &mut impl Rng) -> Su2 {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return Su2::new(v[0] / n, v[1] / n, v[2] / n, v[3] / n);
        }
    }
}

type M2 = [[Complex64; 2]; 2];

fn matrix(g: &Su2) -> M2 {
    let c = Complex64::new;
    [[c(g.a, g.b), c(g.c, g.d)], [c(-g.c, g.d), c(g.a, -g.b)]]
}

/// Angles `(alpha, beta)` from an eigenvector of `m` for `e^{i alpha}`, `alpha` in `(0, pi)`.
fn eigen_angles(m: &Su2, l: &Su2) -> (f64, f64) {
    let (mm, ll) = (matrix(m), matrix(l));
    let alpha = m.a.acos();
    let lam = Complex64::from_polar(1.0, alpha);
    let v = if mm[0][1].norm() > mm[1][0].norm() {
        [mm[0][1], lam - mm[0][0]]
    } else {
        [lam - mm[1][1], mm[1][0]]
    };
    let lv = [ll[0][0] * v[0] + ll[0][1] * v[1], ll[1][0] * v[0] + ll[1][1] * v[1]];
    let i = if v[0].norm() > v[1].norm() { 0 } else { 1 };
    (alpha, (lv[i] / v[i]).arg())
}

#[test]
fn coords_of_diagonal_pairs() {
    assert!(close(pillowcase_coords(&Su2::IDENTITY, &Su2::IDENTITY).unwrap(), 0.0, 0.0));
    let p = pillowcase_coords(&Su2::diagonal(FRAC_PI_2), &Su2::diagonal(1.0)).unwrap();
    assert!(close(p, FRAC_PI_2, 1.0));
}

#[test]
fn coords_of_conjugated_pairs_match_eigenvectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let g = random_unit(&mut rng);
        let m = Su2::diagonal(FRAC_PI_3).conj_by(&g);
        let l = Su2::diagonal(2.0).conj_by(&g);
        let p = pillowcase_coords(&m, &l).unwrap();
        let (a, b) = eigen_angles(&m, &l);
        assert!(close(p, a, b), "{p:?} vs ({a}, {b})");
        assert!(close(p, FRAC_PI_3, 2.0));
    }
}

#[test]
fn coords_reject_bad_input() {
    let m = Su2::diagonal(0.7);
    let l = Su2::from_axis_angle([0.0, 1.0, 0.0], 0.4);
    assert!(matches!(pillowcase_coords(&m, &l), Err(PillowcaseError::NonCommuting(_))));
    let big = Su2::new(1.1, 0.0, 0.0, 0.0);
    assert!(matches!(pillowcase_coords(&big, &Su2::IDENTITY), Err(PillowcaseError::NotUnit(_))));
}

#[test]
fn canonicalize_examples() {
    assert!(close(iota_canonicalize(1.5 * PI, FRAC_PI_2), FRAC_PI_2, 1.5 * PI));
    assert!(close(iota_canonicalize(0.0, 1.5 * PI), 0.0, FRAC_PI_2));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let (a, b) = (rng.random_range(0.0..PI), rng.random_range(0.0..TAU));
        let x = iota_canonicalize(a + PI, b);
        let y = iota_canonicalize(PI - a, TAU - b);
        assert!(close(x, y.alpha, y.beta), "{x:?} vs {y:?}");
    }
}

#[test]
fn central_twist_examples() {
    let p = central_twist(PillowcasePoint::new(FRAC_PI_2, PI));
    assert!(close(p, FRAC_PI_2, PI));
    let p = central_twist(PillowcasePoint::new(FRAC_PI_6, 0.0));
    assert!(close(p, 5.0 * FRAC_PI_6, 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let p = PillowcasePoint::new(rng.random_range(0.0..PI), rng.random_range(0.0..TAU));
        assert!(central_twist(central_twist(p)).dist(&p) < 1e-9);
    }
}

fn line_image(slope: f64, c: f64) -> PillowcaseImage {
    let points = (0..=200)
        .map(|i| {
            let a = FRAC_PI_6 + 4.0 * FRAC_PI_6 * i as f64 / 200.0;
            ImagePoint::new(a, slope * a + c, 0.0)
        })
        .collect();
    PillowcaseImage { arcs: vec![Arc { points }], alpha_margin: FRAC_PI_6, ..Default::default() }
}

fn points(img: &PillowcaseImage) -> Vec<PillowcasePoint> {
    img.all_points().map(|p| p.point()).collect()
}

#[test]
fn mirror_flips_slope_sign() {
    let left = line_image(6.0, PI);
    let right = mirror_image(&left);
    for (p, q) in points(&left).iter().zip(points(&right)) {
        assert!(close(q, p.alpha, TAU - p.beta));
    }
    let expected = points(&line_image(-6.0, PI));
    for (p, q) in points(&right).iter().zip(&expected) {
        assert!(p.dist(q) < 1e-9);
    }
    let twice = mirror_image(&right);
    for (p, q) in points(&left).iter().zip(points(&twice)) {
        assert!(p.dist(&q) < 1e-9);
    }
}

#[test]
fn lift_of_constant_and_reversed_paths() {
    let c = vec![PillowcasePoint::new(1.0, 2.0); 10];
    let l = lift_path(&c).unwrap();
    assert!(l.points.iter().all(|&(a, b)| (a - 1.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-12));

    let path: Vec<_> = (0..=100).map(|i| 0.6 + 2.0 * i as f64 / 100.0).map(|a| PillowcasePoint::new(a, -6.0 * a + PI)).collect();
    let fwd = lift_path(&path).unwrap();
    let mut rev_path = path.clone();
    rev_path.reverse();
    let rev = lift_path(&rev_path).unwrap();
    // equal up to a deck translation by multiples of 2 pi in beta
    let shift = rev.points.last().unwrap().1 - fwd.points[0].1;
    let k = (shift / TAU).round();
    assert!((shift - k * TAU).abs() < 1e-9);
    for (p, q) in fwd.points.iter().zip(rev.points.iter().rev()) {
        assert!((p.0 - q.0).abs() < 1e-9 && (p.1 + k * TAU - q.1).abs() < 1e-9);
    }
}

#[test]
fn lift_of_trefoil_arc_is_monotone() {
    // the right trefoil arc beta = -6 alpha + pi, followed by hand: it crosses beta = 0 twice
    let path: Vec<_> = (0..=400)
        .map(|i| FRAC_PI_6 + 4.0 * FRAC_PI_6 * i as f64 / 400.0)
        .map(|a| PillowcasePoint::new(a, -6.0 * a + PI))
        .collect();
    let l = lift_path(&path).unwrap();
    let betas: Vec<f64> = l.points.iter().map(|p| p.1).collect();
    let decreasing = betas.windows(2).all(|w| w[1] < w[0]);
    let increasing = betas.windows(2).all(|w| w[1] > w[0]);
    assert!(decreasing || increasing);
    let span = (betas[0] - betas.last().unwrap()).abs();
    assert!((span - 4.0 * PI).abs() < 1e-9, "span {span}");
    assert!(span >= TAU);
}

#[test]
fn lift_rejects_coarse_sampling() {
    let path = [PillowcasePoint::new(0.5, 0.0), PillowcasePoint::new(2.5, 2.0)];
    assert!(matches!(lift_path(&path), Err(PillowcaseError::SamplingTooCoarse { .. })));
}

fn su2() -> impl Strategy<Value = Su2> {
    prop::array::uniform4(-1.0f64..1.0)
        .prop_filter("away from zero", |v| v.iter().map(|x| x * x).sum::<f64>() > 0.01)
        .prop_map(|v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            Su2::new(v[0] / n, v[1] / n, v[2] / n, v[3] / n)
        })
}

proptest! {
    #[test]
    fn conjugation_preserves_trace(g in su2(), h in su2()) {
        prop_assert!((h.conj_by(&g).trace() - h.trace()).abs() < 1e-12);
    }

    #[test]
    fn canonicalize_idempotent_and_periodic(a in -20.0f64..20.0, b in -20.0f64..20.0, k in -3i32..3, l in -3i32..3) {
        let p = iota_canonicalize(a, b);
        prop_assert!(p.alpha >= 0.0 && p.alpha <= PI && p.beta >= 0.0 && p.beta < TAU);
        let q = iota_canonicalize(p.alpha, p.beta);
        prop_assert!(close(q, p.alpha, p.beta));
        let r = iota_canonicalize(a + TAU * k as f64, b + TAU * l as f64);
        prop_assert!((r.alpha - p.alpha).abs() < 1e-8 && circle_dist(r.beta, p.beta) < 1e-8);
    }

    #[test]
    fn lift_then_project_is_identity(start in 0.2f64..2.9, b0 in 0.0f64..TAU, steps in prop::collection::vec((-0.05f64..0.05, -0.3f64..0.3), 1..60)) {
        let mut path = vec![PillowcasePoint::new(start, b0)];
        let (mut a, mut b) = (start, b0);
        for (da, db) in steps {
            a = (a + da).clamp(0.1, PI - 0.1);
            b += db;
            path.push(PillowcasePoint::new(a, b));
        }
        let lift = lift_path(&path).unwrap();
        for (p, q) in lift.project().iter().zip(&path) {
            prop_assert!(p.dist(q) < 1e-9);
        }
        for w in lift.points.windows(2) {
            prop_assert!((w[1].0 - w[0].0).abs() < PI && (w[1].1 - w[0].1).abs() < PI);
        }
    }
}
