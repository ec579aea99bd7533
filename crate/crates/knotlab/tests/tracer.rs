use std::f64::consts::{FRAC_PI_3, FRAC_PI_6, PI, TAU};

use knotlab::image_ops::{connected_sum_image, connecting_path_winding, fit_arc_lines, satellite_image, SatelliteSpec};
use knotlab::pillowcase::{central_twist, circle_dist, hausdorff, pillowcase_coords, Arc, ImagePoint, PillowcaseImage};
use knotlab::tracer::{solve_at_alpha, torus_knot_image, trace_image, TraceError, TraceOptions};
use knotlab::{KnotPresentation, Su2};
use num_complex::Complex64;

fn left_trefoil() -> KnotPresentation {
    KnotPresentation::from_json(
        r#"{"generators": ["u", "v"], "relators": ["u v u V U V"], "meridian": "u",
            "longitude": "u v u v u v U U U U U U", "meridional_generators": true}"#,
    )
    .unwrap()
}

fn opts() -> TraceOptions {
    TraceOptions::with_resolution(256)
}

/// `rho(u) = e^{i alpha}` and `rho(v)` the rotation by `alpha` about `(cos t, sin t, 0)`;
/// conjugating by the stabiliser of `rho(u)` brings any `rho(v)` to this form.
fn trefoil_rep(alpha: f64, t: f64) -> (Su2, Su2) {
    (Su2::diagonal(alpha), Su2::from_axis_angle([t.cos(), t.sin(), 0.0], alpha))
}

fn braid_relator_residual(alpha: f64, t: f64) -> f64 {
    let (u, v) = trefoil_rep(alpha, t);
    (u * v * u).dist(&(v * u * v))
}

/// Irreducible zeros of the braid relation along the axis angle, by grid search refined
/// with a ternary search.
fn grid_solutions(alpha: f64) -> Vec<f64> {
    let n = 20_000;
    let f = |t: f64| braid_relator_residual(alpha, t);
    let mut out = Vec::new();
    for i in 1..n {
        let (a, b, c) = ((i - 1) as f64 * PI / n as f64, i as f64 * PI / n as f64, (i + 1) as f64 * PI / n as f64);
        if f(b) <= f(a) && f(b) < f(c) {
            let (mut lo, mut hi) = (a, c);
            for _ in 0..100 {
                let (m1, m2) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
                if f(m1) < f(m2) { hi = m2 } else { lo = m1 }
            }
            let t = 0.5 * (lo + hi);
            if f(t) < 1e-9 && t > 1e-3 && t < PI - 1e-3 {
                out.push(t);
            }
        }
    }
    out
}

/// Smallest residual away from the abelian axis angles.
fn grid_min_residual(alpha: f64) -> f64 {
    (100..1900).map(|i| braid_relator_residual(alpha, i as f64 * PI / 2000.0)).fold(f64::INFINITY, f64::min)
}

#[test]
fn left_trefoil_at_pi_over_3() {
    let oracle = grid_solutions(FRAC_PI_3);
    assert_eq!(oracle.len(), 1, "{oracle:?}");
    let (u, v) = trefoil_rep(FRAC_PI_3, oracle[0]);
    let pres = left_trefoil();
    let lambda = pres.longitude.eval(&[u, v]);
    let expected = pillowcase_coords(&u, &lambda).unwrap();
    assert!(circle_dist(expected.beta, PI) < 1e-6);

    let (sols, _) = solve_at_alpha(&pres, FRAC_PI_3, 0, &opts());
    assert_eq!(sols.len(), 1);
    assert!(circle_dist(sols[0].beta, expected.beta) < 1e-6, "beta {}", sols[0].beta);
}

#[test]
fn left_trefoil_below_the_root_has_no_irreducibles() {
    let alpha = PI / 12.0;
    // the braid relation only vanishes at the abelian axis angles t = 0, pi
    assert!(grid_solutions(alpha).is_empty());
    assert!(grid_min_residual(alpha) > 1e-3);
    let (sols, _) = solve_at_alpha(&left_trefoil(), alpha, 0, &opts());
    assert!(sols.is_empty());
}

#[test]
fn unknot_image_is_empty() {
    let img = trace_image(&KnotPresentation::unknot(), &opts()).unwrap();
    assert!(img.is_empty());
    assert_eq!(connecting_path_winding(&img), 0);
}

#[test]
fn low_resolution_is_rejected() {
    assert_eq!(trace_image(&left_trefoil(), &TraceOptions::with_resolution(32)).unwrap_err(), TraceError::ResolutionTooLow(32));
}

/// `Delta_{T(p,q)}(e^{i theta})` from the product formula, up to a unit.
fn torus_delta(p: i64, q: i64, theta: f64) -> f64 {
    let z = Complex64::from_polar(1.0, theta);
    let one = Complex64::new(1.0, 0.0);
    ((z.powi((p * q) as i32) - one) * (z - one) / ((z.powi(p as i32) - one) * (z.powi(q as i32) - one))).norm()
}

/// Roots of `Delta_{T(p,q)}(e^{2 i alpha})` in `(0, pi)`: `alpha = pi k / (pq)` with `k` divisible
/// by neither `p` nor `q`.
fn torus_root_alphas(p: i64, q: i64) -> Vec<f64> {
    (1..p * q)
        .filter(|k| k % p != 0 && k % q != 0)
        .map(|k| PI * k as f64 / (p * q) as f64)
        .collect()
}

#[test]
fn torus_images_have_expected_arcs() {
    for (p, q) in [(2, 3), (2, 5), (3, 4)] {
        let img = torus_knot_image(p, q, &opts()).unwrap();
        assert_eq!(img.arcs.len() as i64, (p - 1) * (q - 1) / 2, "T({p},{q})");
        for l in fit_arc_lines(&img, 1e-6) {
            assert!(!l.curved && (l.slope + (p * q) as f64).abs() < 1e-6, "T({p},{q}) slope {}", l.slope);
        }
    }
    let img = torus_knot_image(2, 3, &opts()).unwrap();
    let l = &fit_arc_lines(&img, 1e-6)[0];
    assert!((l.alpha_range.0 - FRAC_PI_6).abs() < 1e-6 && (l.alpha_range.1 - 5.0 * FRAC_PI_6).abs() < 1e-6);
    assert!(circle_dist(l.intercept, PI) < 1e-6);
}

#[test]
fn torus_2_5_endpoints_are_alexander_roots() {
    let roots = torus_root_alphas(2, 5);
    assert_eq!(roots.len(), 4);
    for (r, k) in roots.iter().zip([1.0, 3.0, 7.0, 9.0]) {
        assert!((r - k * PI / 10.0).abs() < 1e-12);
    }
    let img = torus_knot_image(2, 5, &opts()).unwrap();
    let mut ends: Vec<f64> = fit_arc_lines(&img, 1e-6).iter().flat_map(|l| [l.alpha_range.0, l.alpha_range.1]).collect();
    ends.sort_by(f64::total_cmp);
    for (e, r) in ends.iter().zip(&roots) {
        assert!((e - r).abs() < 1e-6, "{ends:?}");
    }
}

fn closure_points(img: &PillowcaseImage) -> Vec<ImagePoint> {
    img.arcs.iter().flat_map(|a| a.points.iter().filter(|p| p.closure).copied()).collect()
}

#[test]
fn traced_images_satisfy_pillowcase_facts() {
    let cases: Vec<(KnotPresentation, i64, i64)> = vec![
        (KnotPresentation::torus(2, 3).unwrap(), 2, 3),
        (KnotPresentation::torus(2, 5).unwrap(), 2, 5),
        (KnotPresentation::torus(3, 4).unwrap(), 3, 4),
        (left_trefoil(), 2, 3),
    ];
    for (pres, p, q) in cases {
        let img = trace_image(&pres, &opts()).unwrap();
        let step = PI / 256.0;
        let twisted = img.map_points(central_twist);
        assert!(hausdorff(&img, &twisted) < 2.0 * step, "T({p},{q}) central twist");
        for pt in img.all_points() {
            assert!(pt.alpha > img.alpha_margin && pt.alpha < PI - img.alpha_margin);
            assert!(pt.closure || circle_dist(pt.beta, 0.0) > 1e-9);
        }
        let ends = closure_points(&img);
        assert!(!ends.is_empty());
        for e in ends {
            assert!(circle_dist(e.beta, 0.0) < 1e-6);
            let v = torus_delta(p, q, 2.0 * e.alpha);
            assert!(v < 1e-6, "T({p},{q}): |Delta| = {v} at alpha = {}", e.alpha);
        }
    }
}

#[test]
fn figure_eight_has_a_curved_arc() {
    let img = trace_image(&KnotPresentation::two_bridge(5, 2).unwrap(), &opts()).unwrap();
    assert!(!img.arcs.is_empty());
    assert!(fit_arc_lines(&img, 1e-6).iter().any(|l| l.curved));
}

fn synthetic_line(slope: f64, c: f64, lo: f64, hi: f64) -> PillowcaseImage {
    let points = (0..=300).map(|i| lo + (hi - lo) * i as f64 / 300.0).map(|a| ImagePoint::new(a, slope * a + c, 0.0)).collect();
    let mut img = PillowcaseImage { arcs: vec![Arc { points }], ..Default::default() };
    img.recompute_margin();
    img
}

#[test]
fn exact_line_fits_with_zero_residual() {
    let l = &fit_arc_lines(&synthetic_line(-6.0, PI, 0.6, 2.5), 1e-9)[0];
    assert!(l.residual < 1e-12 && !l.curved);
    assert!((l.slope + 6.0).abs() < 1e-12);
}

#[test]
fn connecting_path_windings() {
    // the trefoil arc lifts to a segment with beta falling by 4 pi (two turns)
    let img = torus_knot_image(2, 3, &opts()).unwrap();
    assert_eq!(connecting_path_winding(&img), 2);
    let img = torus_knot_image(2, 5, &opts()).unwrap();
    assert!(connecting_path_winding(&img) >= 1);
}

fn samples(img: &PillowcaseImage) -> Vec<(f64, f64)> {
    img.all_points().map(|p| (p.alpha, p.beta)).collect()
}

#[test]
fn satellite_with_winding_one_is_identity() {
    let img = synthetic_line(-6.0, PI, FRAC_PI_6, 5.0 * FRAC_PI_6);
    let s = satellite_image(&img, &SatelliteSpec::winding(1)).unwrap();
    assert!(hausdorff(&img, &s) < 1e-12);
    assert!(s.partial);
    assert!(satellite_image(&img, &SatelliteSpec::winding(0)).is_err());
}

#[test]
fn satellite_with_winding_two_follows_the_formula() {
    let img = synthetic_line(-6.0, PI, FRAC_PI_6, 5.0 * FRAC_PI_6);
    let s = satellite_image(&img, &SatelliteSpec::winding(2)).unwrap();
    let got = samples(&s);
    for (a, b) in samples(&img) {
        for k in 0..2 {
            let want = ImagePoint::new((a + TAU * k as f64) / 2.0, 2.0 * b, 0.0).point();
            assert!(got.iter().any(|&(x, y)| (x - want.alpha).abs() < 1e-9 && circle_dist(y, want.beta) < 1e-9));
        }
    }
    for l in fit_arc_lines(&s, 1e-6) {
        assert!((l.slope + 24.0).abs() < 1e-6, "slope {}", l.slope);
    }
}

#[test]
fn satellite_windings_compose() {
    let img = synthetic_line(-6.0, PI, FRAC_PI_6, 5.0 * FRAC_PI_6);
    for (w, v) in [(2, 3), (-1, 2), (3, -2)] {
        let twice = satellite_image(&satellite_image(&img, &SatelliteSpec::winding(w)).unwrap(), &SatelliteSpec::winding(v)).unwrap();
        let once = satellite_image(&img, &SatelliteSpec::winding(w * v)).unwrap();
        assert!(hausdorff(&twice, &once) < 1e-9, "w = {w}, w' = {v}");
    }
}

#[test]
fn connected_sums() {
    let a = synthetic_line(-6.0, PI, FRAC_PI_6, 5.0 * FRAC_PI_6);
    let sum = connected_sum_image(&a, &PillowcaseImage::empty());
    assert!(hausdorff(&sum, &a) < 1e-12);
    let sum = connected_sum_image(&a, &a);
    assert!(sum.partial);
    let lines = fit_arc_lines(&sum, 1e-6);
    assert!(lines.iter().any(|l| (l.slope + 12.0).abs() < 1e-6));
    // pointwise oracle on the common range: beta = -12 alpha + 2 pi
    for p in sum.arcs.iter().flat_map(|x| &x.points) {
        let on_sum = circle_dist(p.beta, -12.0 * p.alpha + TAU) < 1e-9;
        let on_summand = circle_dist(p.beta, -6.0 * p.alpha + PI) < 1e-9;
        assert!(on_sum || on_summand);
    }
    let b = synthetic_line(-10.0, 0.3, 0.4, 2.0);
    assert!(hausdorff(&connected_sum_image(&a, &b), &connected_sum_image(&b, &a)) < 1e-12);
}

#[test]
fn torus_presentation_agrees_with_braid_closure() {
    let step = PI / 256.0;
    for (p, q, word) in [(2, 3, vec![1; 3]), (2, 5, vec![1; 5])] {
        let from_torus = torus_knot_image(p, q, &opts()).unwrap();
        let braid = knotlab::braid::Braid::from_word(word).unwrap();
        let from_braid = trace_image(&KnotPresentation::from_braid(&braid).unwrap(), &opts()).unwrap();
        assert_eq!(from_torus.arcs.len(), from_braid.arcs.len(), "T({p},{q})");
        let d = hausdorff(&from_torus, &from_braid);
        assert!(d < 3.0 * step, "T({p},{q}): Hausdorff distance {d}");
    }
}
