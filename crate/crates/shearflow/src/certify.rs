//! End-to-end run: freeze, project, split; measure each stage against its bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{d0, d1, h0, h1, a1};
use crate::field::{second_derivative_norm, FrozenField, ShearSumField, VectorField};
use crate::flow::{omega_flow, reference_flow, theta_flow, PiecewiseShearingIsotopy, ReferenceOptions, SplittingSchedule};
use crate::fourier::fourier_project;
use crate::linalg::{add, grid_points, mat_add, mat_mul, mat_sub, norm, op_norm, scale, M2, V2};
use crate::metrics::{equivariance_defect, fixed_point_defect, jacobian_det_defect, CrDistance, MIN_GRID};
use crate::shear::ShearingStep;
use crate::ShearError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyConfig {
    pub n: usize,
    pub k: usize,
    pub kmax: i64,
    pub equivariant: bool,
    pub grid: usize,
    pub times: Vec<f64>,
    /// Multiplier applied to every estimated constant.
    pub inflation: f64,
    pub slack: f64,
    /// Remainder bound for the single-cycle `C^1` estimate; when absent only the
    /// `C^0` stage-3 bound is asserted.
    pub r1: Option<f64>,
    pub reference: ReferenceOptions,
    /// Time samples per interval used for sup estimates over `t`.
    pub time_samples: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            n: 8,
            k: 8,
            kmax: 4,
            equivariant: false,
            grid: 64,
            times: vec![0.25, 0.5, 0.75, 1.0],
            inflation: 1.1,
            slack: 1e-9,
            r1: None,
            reference: ReferenceOptions::default(),
            time_samples: 8,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageBound {
    pub c0: f64,
    pub c1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSlice {
    pub t: f64,
    pub freeze: CrDistance,
    pub fourier: CrDistance,
    pub splitting: CrDistance,
    pub total: CrDistance,
    pub freeze_bound: StageBound,
    pub fourier_bound: StageBound,
    pub splitting_bound: StageBound,
    pub total_bound: StageBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalConstants {
    pub modes: usize,
    pub k_bound: f64,
    pub m_bound: f64,
    pub fourier_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub stage: String,
    pub order: u8,
    pub t: f64,
    pub measured: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub config: CertifyConfig,
    pub k_field: f64,
    pub freeze_gap: f64,
    pub fourier_gap: f64,
    pub intervals: Vec<IntervalConstants>,
    pub slices: Vec<TimeSlice>,
    pub jacobian_det_defect: f64,
    pub equivariance_defect: f64,
    pub fixed_point_defect: f64,
    pub splitting_c1_asserted: bool,
    pub violations: Vec<Violation>,
}

/// `sup_p |X - Y| + ||DX - DY||` on a grid.
fn c1_gap(x: &dyn VectorField, tx: f64, y: &dyn VectorField, ty: f64, pts: &[V2]) -> f64 {
    let (a, b) = pts
        .par_iter()
        .map(|&p| {
            let d = add(x.value(tx, p), scale(y.value(ty, p), -1.0));
            (norm(d), op_norm(&mat_sub(&x.jacobian(tx, p), &y.jacobian(ty, p))))
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    a + b
}

/// `max_{i<=2} sup ||D^i X_t||` over the sampled times and grid.
fn field_constant(x: &dyn VectorField, times: &[f64], pts: &[V2]) -> f64 {
    times
        .iter()
        .map(|&t| {
            pts.par_iter()
                .map(|&p| norm(x.value(t, p)).max(op_norm(&x.jacobian(t, p))).max(second_derivative_norm(x, t, p)))
                .reduce(|| 0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// `[A, B] = DB A - DA B` and its derivative for `A = W_q`, `B = W_0 + ... + W_{q-1}`.
fn bracket_sup(modes: &[ShearingStep], pts: &[V2]) -> f64 {
    let mut best: f64 = 0.0;
    for q in 1..modes.len() {
        let a = &modes[q];
        let bs = &modes[..q];
        let m = pts
            .par_iter()
            .map(|&p| {
                let av = a.field(p);
                let da = a.field_jacobian(p);
                let bv = bs.iter().fold([0.0; 2], |acc, s| add(acc, s.field(p)));
                let db = bs.iter().fold([[0.0; 2]; 2], |acc, s| mat_add(&acc, &s.field_jacobian(p)));
                let br = add(crate::linalg::mat_vec(&db, av), scale(crate::linalg::mat_vec(&da, bv), -1.0));
                let mut dbr = mat_sub(&mat_mul(&db, &da), &mat_mul(&da, &db));
                for (c, e) in [[1.0, 0.0], [0.0, 1.0]].into_iter().enumerate() {
                    let hb = bs.iter().fold([0.0; 2], |acc, s| add(acc, s.field_hessian_apply(p, av, e)));
                    let ha = a.field_hessian_apply(p, bv, e);
                    dbr[0][c] += hb[0] - ha[0];
                    dbr[1][c] += hb[1] - ha[1];
                }
                norm(br).max(op_norm(&dbr))
            })
            .reduce(|| 0.0, f64::max);
        best = best.max(m);
    }
    best
}

fn interval_k_bound(modes: &[ShearingStep]) -> f64 {
    (0..=2).map(|i| modes.iter().map(|s| s.derivative_bound(i)).sum::<f64>()).fold(0.0, f64::max)
}

fn splitting_bound(ints: &[IntervalConstants], k: usize, n: usize, t: f64, r1: f64) -> StageBound {
    let nf = n as f64;
    let j = ((t * nf).floor().max(0.0) as usize).min(n - 1);
    let (mut e0, mut e1, mut lip) = (0.0, 0.0, 1.0f64);
    for (i, c) in ints.iter().enumerate().take(j + 1) {
        let tau = if i < j { 1.0 / nf } else { t - j as f64 / nf };
        let grow = (c.k_bound * tau).exp();
        let l0 = d0(k, n, c.modes, tau, c.m_bound, c.k_bound);
        let l1 = d1(k, n, c.modes, tau, c.m_bound, c.k_bound, r1);
        e1 = l1 * lip + tau * a1(tau, c.k_bound) * e0 * lip + grow * e1;
        e0 = l0 + grow * e0;
        lip *= grow;
    }
    StageBound { c0: e0, c1: e0 + e1 }
}

/// Runs the pipeline and evaluates every bound without asserting.
pub fn run_pipeline(x: &dyn VectorField, cfg: &CertifyConfig) -> Result<(CertificationReport, PiecewiseShearingIsotopy), ShearError> {
    if cfg.grid < MIN_GRID {
        return Err(ShearError::GridTooSmall(cfg.grid));
    }
    let schedule = SplittingSchedule::uniform(cfg.n, cfg.k)?;
    let n = cfg.n;
    let nf = n as f64;
    let pts = grid_points(cfg.grid, 0.0);
    let infl = cfg.inflation;

    let projections = (0..n).map(|j| fourier_project(x, j as f64 / nf, cfg.kmax, cfg.equivariant)).collect::<Result<Vec<_>, _>>()?;
    let steps: Vec<Vec<ShearingStep>> = projections.iter().map(|p| p.steps()).collect();
    let iso = PiecewiseShearingIsotopy::new(schedule, steps.clone())?;

    let samples: Vec<f64> = (0..=cfg.time_samples * n).map(|i| i as f64 / (cfg.time_samples * n) as f64).collect();
    let k_field = infl * field_constant(x, &samples, &pts);
    let mut freeze_gap: f64 = 0.0;
    for j in 0..n {
        for s in 0..=cfg.time_samples {
            let ts = (j as f64 + s as f64 / cfg.time_samples as f64) / nf;
            freeze_gap = freeze_gap.max(c1_gap(x, j as f64 / nf, x, ts, &pts));
        }
    }
    freeze_gap *= infl;
    let fourier_gap = infl * projections.iter().map(|p| p.residual_c1).fold(0.0, f64::max);
    let intervals: Vec<IntervalConstants> = steps
        .iter()
        .zip(&projections)
        .map(|(s, p)| IntervalConstants {
            modes: s.len(),
            k_bound: infl * interval_k_bound(s),
            m_bound: infl * bracket_sup(s, &pts),
            fourier_residual: p.residual_c1,
        })
        .collect();

    let frozen: Vec<FrozenField> = (0..n).map(|j| FrozenField { inner: x, t0: j as f64 / nf }).collect();
    let frozen_refs: Vec<&dyn VectorField> = frozen.iter().map(|f| f as &dyn VectorField).collect();
    let zs: Vec<ShearSumField> = steps.iter().map(|s| ShearSumField { steps: s.clone() }).collect();
    let z_refs: Vec<&dyn VectorField> = zs.iter().map(|f| f as &dyn VectorField).collect();
    let r1 = cfg.r1.unwrap_or(0.0);

    let mut slices = Vec::new();
    let mut violations = Vec::new();
    for &t in &cfg.times {
        type Row = ((V2, M2), (V2, M2), (V2, M2), (V2, M2));
        let rows: Vec<Row> = pts
            .par_iter()
            .map(|&p| -> Result<Row, ShearError> {
                let psi = reference_flow(x, t, p, &cfg.reference)?;
                let tx = theta_flow(&frozen_refs, t, p, &cfg.reference)?;
                let tz = theta_flow(&z_refs, t, p, &cfg.reference)?;
                Ok((psi, tx, tz, omega_flow(&iso, t, p)))
            })
            .collect::<Result<_, _>>()?;
        let fold = |f: &dyn Fn(&Row) -> CrDistance| rows.iter().map(f).fold(CrDistance::default(), CrDistance::max);
        let freeze = fold(&|r| CrDistance::between(&r.0, &r.1));
        let fourier = fold(&|r| CrDistance::between(&r.1, &r.2));
        let splitting = fold(&|r| CrDistance::between(&r.2, &r.3));
        let total = fold(&|r| CrDistance::between(&r.0, &r.3));
        let freeze_bound = StageBound { c0: h0(n, t, freeze_gap, k_field), c1: h0(n, t, freeze_gap, k_field) + h1(n, t, freeze_gap, k_field) };
        let kz = k_field + fourier_gap;
        let fourier_bound = StageBound { c0: h0(n, t, fourier_gap, kz), c1: h0(n, t, fourier_gap, kz) + h1(n, t, fourier_gap, kz) };
        let splitting_bound = splitting_bound(&intervals, cfg.k, n, t, r1);
        let total_bound = StageBound {
            c0: freeze_bound.c0 + fourier_bound.c0 + splitting_bound.c0,
            c1: freeze_bound.c1 + fourier_bound.c1 + splitting_bound.c1,
        };
        let mut check = |stage: &str, order: u8, measured: f64, bound: f64| {
            if measured > bound + cfg.slack {
                violations.push(Violation { stage: stage.to_string(), order, t, measured, bound });
            }
        };
        check("freeze", 0, freeze.c0, freeze_bound.c0);
        check("freeze", 1, freeze.c1(), freeze_bound.c1);
        check("fourier", 0, fourier.c0, fourier_bound.c0);
        check("fourier", 1, fourier.c1(), fourier_bound.c1);
        check("splitting", 0, splitting.c0, splitting_bound.c0);
        check("total", 0, total.c0, total_bound.c0);
        if cfg.r1.is_some() {
            check("splitting", 1, splitting.c1(), splitting_bound.c1);
            check("total", 1, total.c1(), total_bound.c1);
        }
        slices.push(TimeSlice { t, freeze, fourier, splitting, total, freeze_bound, fourier_bound, splitting_bound, total_bound });
    }

    let end = cfg.times.iter().copied().fold(0.0, f64::max);
    let omega = |p: V2| omega_flow(&iso, end, p);
    let report = CertificationReport {
        config: cfg.clone(),
        k_field,
        freeze_gap,
        fourier_gap,
        intervals,
        slices,
        jacobian_det_defect: jacobian_det_defect(omega, 128),
        equivariance_defect: equivariance_defect(omega, cfg.grid),
        fixed_point_defect: fixed_point_defect(omega),
        splitting_c1_asserted: cfg.r1.is_some(),
        violations,
    };
    Ok((report, iso))
}

/// Runs the pipeline and fails on the first measured error exceeding its bound.
pub fn certify_run(x: &dyn VectorField, cfg: &CertifyConfig) -> Result<CertificationReport, ShearError> {
    let (report, _) = run_pipeline(x, cfg)?;
    if let Some(v) = report.violations.first() {
        return Err(ShearError::BoundViolated { stage: v.stage.clone(), order: v.order, t: v.t, measured: v.measured, bound: v.bound });
    }
    Ok(report)
}

