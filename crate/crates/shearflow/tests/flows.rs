use shearflow::field::{FrozenField, ShearSumField};
use shearflow::flow::{flow_between, omega_flow, reference_flow, rk4_fixed, theta_flow, xi_flow, ReferenceOptions};
use shearflow::linalg::{det, torus_dist, TAU};
use shearflow::shear::shear_step_apply;
use shearflow::{HamiltonianField, PiecewiseShearingIsotopy, ShearingStep, SplittingSchedule, TrigProfile, VectorField};
use std::f64::consts::FRAC_PI_2;

fn opts() -> ReferenceOptions {
    ReferenceOptions::default()
}

fn sine_shear() -> ShearingStep {
    ShearingStep::new([1, 0], [0, 1], TrigProfile::sine(1, 1.0)).unwrap()
}

fn close(a: [f64; 2], b: [f64; 2], tol: f64) -> bool {
    (a[0] - b[0]).abs() < tol && (a[1] - b[1]).abs() < tol
}

#[test]
fn zero_field_is_identity() {
    let z = ShearSumField::default();
    let (q, j) = reference_flow(&z, 0.7, [0.4, 0.9], &opts()).unwrap();
    assert_eq!(q, [0.4, 0.9]);
    assert_eq!(j, [[1.0, 0.0], [0.0, 1.0]]);
}

#[test]
fn constant_field_translates() {
    let c = ShearSumField {
        steps: vec![
            ShearingStep::new([1, 0], [0, 1], TrigProfile::constant(0.3)).unwrap(),
            ShearingStep::new([0, 1], [1, 0], TrigProfile::constant(-1.2)).unwrap(),
        ],
    };
    let (q, j) = reference_flow(&c, 0.5, [1.0, 1.0], &opts()).unwrap();
    assert!(close(q, [1.15, 0.4], 1e-13));
    assert!((j[0][0] - 1.0).abs() < 1e-14 && j[0][1].abs() < 1e-14);
}

#[test]
fn reference_flow_matches_closed_form_shear() {
    let s = sine_shear();
    let x = ShearSumField { steps: vec![s.clone()] };
    for p in [[0.0, FRAC_PI_2], [1.0, 0.3], [-2.0, 4.0]] {
        let (q, j) = reference_flow(&x, 1.0, p, &opts()).unwrap();
        let (q2, j2) = shear_step_apply(&s, 1.0, p);
        assert!(close(q, q2, 1e-10));
        assert!((j[0][1] - j2[0][1]).abs() < 1e-10);
    }
}

#[test]
fn rk4_is_fourth_order() {
    let x = HamiltonianField::test_field();
    let p = [0.7, 0.4];
    let exact = reference_flow(&x, 1.0, p, &ReferenceOptions { tol: 1e-14, ..opts() }).unwrap().0;
    let err = |n| torus_dist(rk4_fixed(&x, 0.0, 1.0, p, n).0, exact);
    let (e1, e2) = (err(8), err(16));
    assert!(e1 / e2 >= 12.0, "ratio {}", e1 / e2);
}

#[test]
fn theta_with_one_piece_is_the_flow() {
    let x = HamiltonianField::sin_sin(|_| 1.0);
    let fields: Vec<&dyn VectorField> = vec![&x];
    let p = [0.3, 2.0];
    let a = theta_flow(&fields, 0.6, p, &opts()).unwrap();
    let b = reference_flow(&x, 0.6, p, &opts()).unwrap();
    assert!(close(a.0, b.0, 1e-12));
}

#[test]
fn theta_of_equal_fields_is_autonomous_flow() {
    let x = HamiltonianField::sin_sin(|_| 1.0);
    let fields: Vec<&dyn VectorField> = vec![&x; 5];
    for p in [[0.3, 2.0], [4.0, 1.0]] {
        let a = theta_flow(&fields, 0.9, p, &opts()).unwrap();
        let b = reference_flow(&x, 0.9, p, &opts()).unwrap();
        assert!(close(a.0, b.0, 1e-9));
    }
}

#[test]
fn theta_is_continuous_at_breakpoints() {
    let x = HamiltonianField::test_field();
    let frozen: Vec<FrozenField> = (0..4).map(|j| FrozenField { inner: &x, t0: j as f64 / 4.0 }).collect();
    let fields: Vec<&dyn VectorField> = frozen.iter().map(|f| f as &dyn VectorField).collect();
    let p = [1.0, 0.5];
    for j in 1..4 {
        let t = j as f64 / 4.0;
        let l = theta_flow(&fields, t - 1e-12, p, &opts()).unwrap().0;
        let r = theta_flow(&fields, t, p, &opts()).unwrap().0;
        assert!(close(l, r, 1e-9));
    }
}

#[test]
fn xi_with_one_mode_is_the_shear() {
    let s = sine_shear();
    let p = [0.2, 1.1];
    let a = xi_flow(std::slice::from_ref(&s), 3, 2, 0.4, p);
    let b = shear_step_apply(&s, 0.4, p);
    assert!(close(a.0, b.0, 1e-14));
}

#[test]
fn commuting_modes_split_exactly() {
    // both modes shear along (1, 0) with normal (0, 1): the fields commute
    let a = ShearingStep::new([1, 0], [0, 1], TrigProfile::sine(1, 0.7)).unwrap();
    let b = ShearingStep::new([1, 0], [0, 1], TrigProfile::sine(2, -0.4)).unwrap();
    let sum = ShearSumField { steps: vec![a.clone(), b.clone()] };
    for k in [1, 2, 5] {
        for p in [[0.1, 0.4], [2.0, 5.0]] {
            let x = xi_flow(&[a.clone(), b.clone()], k, 1, 1.0, p).0;
            let y = reference_flow(&sum, 1.0, p, &opts()).unwrap().0;
            assert!(close(x, y, 1e-12));
        }
    }
}

#[test]
fn xi_and_omega_are_area_preserving() {
    let modes = vec![
        ShearingStep::new([-1, 1], [1, 1], TrigProfile::sine(1, 0.5)).unwrap(),
        ShearingStep::new([1, 1], [1, -1], TrigProfile::sine(1, 0.5)).unwrap(),
        ShearingStep::new([1, 0], [0, 1], TrigProfile { constant: 0.2, terms: vec![(3, 0.1, 0.3)] }).unwrap(),
    ];
    let iso = PiecewiseShearingIsotopy::new(SplittingSchedule::uniform(4, 6).unwrap(), vec![modes.clone(); 4]).unwrap();
    for i in 0..128 {
        for j in 0..128 {
            let p = [TAU * i as f64 / 128.0, TAU * j as f64 / 128.0];
            assert!((det(&xi_flow(&modes, 7, 2, 0.37, p).1) - 1.0).abs() < 1e-13);
            assert!((det(&omega_flow(&iso, 0.83, p).1) - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn omega_with_one_interval_one_mode_is_the_shear() {
    let s = sine_shear();
    let iso = PiecewiseShearingIsotopy::new(SplittingSchedule::uniform(1, 1).unwrap(), vec![vec![s.clone()]]).unwrap();
    let p = [0.5, 0.8];
    assert!(close(omega_flow(&iso, 0.6, p).0, shear_step_apply(&s, 0.6, p).0, 1e-15));
}

#[test]
fn omega_of_time_independent_shear_is_exact() {
    let s = sine_shear();
    for (n, k) in [(1, 1), (3, 2), (8, 5)] {
        let iso = PiecewiseShearingIsotopy::new(SplittingSchedule::uniform(n, k).unwrap(), vec![vec![s.clone()]; n]).unwrap();
        let p = [0.5, 0.8];
        assert!(close(omega_flow(&iso, 0.77, p).0, shear_step_apply(&s, 0.77, p).0, 1e-13));
    }
}

fn diagonal_modes() -> Vec<ShearingStep> {
    vec![
        ShearingStep::new([-1, 1], [1, 1], TrigProfile::sine(1, 0.5)).unwrap(),
        ShearingStep::new([1, 1], [1, -1], TrigProfile::sine(1, 0.5)).unwrap(),
    ]
}

fn cycle_error(modes: &[ShearingStep], n: usize) -> f64 {
    let z = ShearSumField { steps: modes.to_vec() };
    let o = ReferenceOptions { tol: 1e-13, ..opts() };
    let mut worst: f64 = 0.0;
    for i in 0..16 {
        for j in 0..16 {
            let p = [TAU * i as f64 / 16.0 + 0.1, TAU * j as f64 / 16.0 + 0.05];
            let a = xi_flow(modes, 1, n, 1.0 / n as f64, p).0;
            let b = flow_between(&z, 0.0, 1.0 / n as f64, p, &o).unwrap().0;
            worst = worst.max(torus_dist(a, b));
        }
    }
    worst
}

#[test]
fn one_cycle_error_is_quadratic_in_step() {
    let m = diagonal_modes();
    for n in [4, 8, 16] {
        let ratio = cycle_error(&m, n) / cycle_error(&m, 2 * n);
        assert!(ratio >= 3.0, "n = {n}: ratio {ratio}");
    }
}

#[test]
fn splitting_error_vanishes_as_k_grows() {
    let m = diagonal_modes();
    let z = ShearSumField { steps: m.clone() };
    let err = |k: usize| {
        let mut worst: f64 = 0.0;
        for i in 0..8 {
            for j in 0..8 {
                let p = [TAU * i as f64 / 8.0 + 0.2, TAU * j as f64 / 8.0 + 0.3];
                let a = xi_flow(&m, k, 2, 0.5, p).0;
                let b = reference_flow(&z, 0.5, p, &opts()).unwrap().0;
                worst = worst.max(torus_dist(a, b));
            }
        }
        worst
    };
    let errs: Vec<f64> = [2, 4, 8, 16].iter().map(|&k| err(k)).collect();
    let rises = errs.windows(2).filter(|w| w[1] > w[0]).count();
    assert!(rises <= 1, "{errs:?}");
    assert!(errs[3] < errs[0] / 4.0, "{errs:?}");
}
