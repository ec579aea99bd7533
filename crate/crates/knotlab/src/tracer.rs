//! Numerical tracing of the pillowcase image of the irreducible characters.
//!
//! For each `alpha` on the grid the meridian is pinned to `exp(alpha i)` and the relator
//! equations are solved by multi-start Levenberg-Marquardt. Solutions are gauge fixed
//! against the residual `U(1)` (conjugation by `exp(t i)`), deduplicated, and then
//! joined into arcs by a continuation pass over the grid.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pillowcase::{lift_path, Arc, ImagePoint, PillowcaseImage, PillowcasePoint};
use crate::presentation::{KnotPresentation, PresentationError};
use crate::su2::Su2;

#[derive(Debug, Error, PartialEq)]
pub enum TraceError {
    #[error("invalid presentation: {0}")]
    PresentationInvalid(#[from] PresentationError),
    #[error("resolution {0} is below the minimum of 64 samples")]
    ResolutionTooLow(usize),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceOptions {
    /// Number of grid samples `alpha_i = (i + 1/2) pi / resolution`.
    pub resolution: usize,
    /// Random starts per grid sample.
    pub starts: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Residual norm at which the solver stops.
    pub tol: f64,
    /// Largest residual accepted as a solution.
    pub accept: f64,
    /// Pairwise commutator norm above which a solution counts as irreducible.
    pub irreducible_tol: f64,
    /// Feature distance below which two solutions are the same class.
    pub dedupe_tol: f64,
    /// Distance threshold for matching solutions at neighbouring samples.
    pub match_tol: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            resolution: 256,
            starts: 64,
            seed: 0x5eed_2024,
            max_iter: 100,
            tol: 1e-12,
            accept: 1e-10,
            irreducible_tol: 1e-6,
            dedupe_tol: 1e-6,
            match_tol: 0.2,
        }
    }
}

impl TraceOptions {
    pub fn with_resolution(resolution: usize) -> Self {
        TraceOptions { resolution, ..Default::default() }
    }
}

pub fn alpha_grid(resolution: usize) -> Vec<f64> {
    (0..resolution).map(|i| (i as f64 + 0.5) * PI / resolution as f64).collect()
}

#[derive(Clone, Copy, Debug)]
enum Mode {
    /// Generator `fixed` is pinned to `exp(sign * alpha i)`; every other generator is
    /// `cos(alpha) + sin(alpha) u` with `u` on the unit sphere.
    Meridional { fixed: usize, sign: f64 },
    /// Generators range over all of SU(2); the meridian word is constrained instead.
    Free,
}

struct Problem<'a> {
    pres: &'a KnotPresentation,
    alpha: f64,
    mode: Mode,
}

/// An irreducible solution at one grid value, gauge fixed.
#[derive(Clone, Debug)]
pub struct Solution {
    pub images: Vec<Su2>,
    pub features: Vec<f64>,
    pub beta: f64,
    pub residual: f64,
}

fn tangent_basis(u: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let t = if u[0].abs() < 0.6 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let mut e1 = cross(u, t);
    let n = norm3(e1);
    e1 = [e1[0] / n, e1[1] / n, e1[2] / n];
    (e1, cross(u, e1))
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm3(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn axis_of(g: &Su2) -> [f64; 3] {
    let v = g.imag();
    let n = norm3(v);
    if n < 1e-300 {
        [1.0, 0.0, 0.0]
    } else {
        [v[0] / n, v[1] / n, v[2] / n]
    }
}

fn random_axis(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..1.0);
    let t: f64 = rng.random_range(0.0..TAU);
    let r = (1.0 - z * z).sqrt();
    [r * t.cos(), r * t.sin(), z]
}

impl<'a> Problem<'a> {
    fn new(pres: &'a KnotPresentation, alpha: f64) -> Self {
        let mode = if pres.meridional_generators && pres.meridian.0.len() == 1 {
            let l = pres.meridian.0[0];
            Mode::Meridional { fixed: l.unsigned_abs() as usize - 1, sign: l.signum() as f64 }
        } else {
            Mode::Free
        };
        Problem { pres, alpha, mode }
    }

    fn meridian_target(&self) -> Su2 {
        Su2::diagonal(self.alpha)
    }

    fn nparams(&self) -> usize {
        let g = self.pres.generators();
        match self.mode {
            Mode::Meridional { .. } => 2 * (g - 1),
            Mode::Free => 3 * g,
        }
    }

    fn generator_with_axis(&self, u: [f64; 3]) -> Su2 {
        Su2::from_axis_angle(u, self.alpha)
    }

    /// Moves a state (possibly from another alpha) onto this problem's constraint set.
    fn adapt(&self, images: &[Su2]) -> Vec<Su2> {
        match self.mode {
            Mode::Meridional { fixed, sign } => images
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    if i == fixed {
                        Su2::diagonal(sign * self.alpha)
                    } else {
                        self.generator_with_axis(axis_of(g))
                    }
                })
                .collect(),
            Mode::Free => images.to_vec(),
        }
    }

    fn random_state(&self, rng: &mut ChaCha8Rng) -> Vec<Su2> {
        let g = self.pres.generators();
        match self.mode {
            Mode::Meridional { .. } => {
                let v: Vec<Su2> = (0..g).map(|_| self.generator_with_axis(random_axis(rng))).collect();
                self.adapt(&v)
            }
            Mode::Free => (0..g)
                .map(|_| {
                    let a: f64 = rng.random_range(-1.0..1.0);
                    let r = (1.0 - a * a).sqrt();
                    let u = random_axis(rng);
                    Su2::new(a, r * u[0], r * u[1], r * u[2])
                })
                .collect(),
        }
    }

    fn retract(&self, state: &[Su2], delta: &[f64]) -> Vec<Su2> {
        match self.mode {
            Mode::Meridional { fixed, .. } => {
                let mut out = state.to_vec();
                let mut k = 0;
                for (i, g) in state.iter().enumerate() {
                    if i == fixed {
                        continue;
                    }
                    let u = axis_of(g);
                    let (e1, e2) = tangent_basis(u);
                    let (d1, d2) = (delta[k], delta[k + 1]);
                    k += 2;
                    let v = [u[0] + d1 * e1[0] + d2 * e2[0], u[1] + d1 * e1[1] + d2 * e2[1], u[2] + d1 * e1[2] + d2 * e2[2]];
                    let n = norm3(v);
                    out[i] = self.generator_with_axis([v[0] / n, v[1] / n, v[2] / n]);
                }
                out
            }
            Mode::Free => state
                .iter()
                .enumerate()
                .map(|(i, g)| (*g * Su2::exp([delta[3 * i], delta[3 * i + 1], delta[3 * i + 2]])).normalized())
                .collect(),
        }
    }

    fn residual(&self, state: &[Su2]) -> Vec<f64> {
        let mut r = Vec::with_capacity(4 * (self.pres.relators.len() + 1));
        for w in &self.pres.relators {
            let v = w.eval(state);
            r.extend_from_slice(&[v.a - 1.0, v.b, v.c, v.d]);
        }
        if let Mode::Free = self.mode {
            let m = self.pres.meridian.eval(state);
            let t = self.meridian_target();
            r.extend_from_slice(&[m.a - t.a, m.b - t.b, m.c - t.c, m.d - t.d]);
        }
        r
    }

    /// Levenberg-Marquardt with a forward-difference Jacobian.
    fn solve(&self, start: Vec<Su2>, opts: &TraceOptions) -> (Vec<Su2>, f64) {
        let n = self.nparams();
        let mut x = start;
        let mut r = self.residual(&x);
        let mut cost: f64 = r.iter().map(|v| v * v).sum();
        if n == 0 {
            return (x, cost.sqrt());
        }
        let m = r.len();
        let mut lambda = 1e-3;
        let h = 1e-7;
        for _ in 0..opts.max_iter {
            if cost.sqrt() < opts.tol {
                break;
            }
            let mut jac = DMatrix::<f64>::zeros(m, n);
            let mut d = vec![0.0; n];
            for j in 0..n {
                d[j] = h;
                let rj = self.residual(&self.retract(&x, &d));
                d[j] = 0.0;
                for i in 0..m {
                    jac[(i, j)] = (rj[i] - r[i]) / h;
                }
            }
            let rv = DVector::from_vec(r.clone());
            let jt = jac.transpose();
            let a = &jt * &jac;
            let g = &jt * rv;
            let mut improved = false;
            for _ in 0..12 {
                let mut damped = a.clone();
                for k in 0..n {
                    damped[(k, k)] += lambda * (1.0 + a[(k, k)]);
                }
                let Some(ch) = damped.cholesky() else {
                    lambda *= 10.0;
                    continue;
                };
                let step = ch.solve(&(-&g));
                let xn = self.retract(&x, step.as_slice());
                let rn = self.residual(&xn);
                let cn: f64 = rn.iter().map(|v| v * v).sum();
                if cn < cost {
                    x = xn;
                    r = rn;
                    cost = cn;
                    lambda = (lambda / 3.0).max(1e-15);
                    improved = true;
                    break;
                }
                lambda *= 4.0;
            }
            if !improved {
                break;
            }
        }
        (x, cost.sqrt())
    }
}

fn is_irreducible(images: &[Su2], tol: f64) -> bool {
    let mut best: f64 = 0.0;
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            best = best.max(images[i].commutator_norm(&images[j]));
        }
    }
    best > tol
}

/// Conjugates by a rotation about the x-axis so that the first generator whose
/// imaginary part leaves the x-axis lies in the half-plane `y = 0, z > 0`.
fn gauge_fix(images: &[Su2]) -> Vec<Su2> {
    let Some(g) = images.iter().find(|g| g.c.hypot(g.d) > 1e-8) else {
        return images.to_vec();
    };
    let theta = g.d.atan2(g.c);
    // conjugation by exp(phi/2 i) rotates the (y, z) plane by phi
    let phi = PI / 2.0 - theta;
    let h = Su2::diagonal(phi / 2.0);
    images.iter().map(|x| x.conj_by(&h)).collect()
}

fn features(images: &[Su2]) -> Vec<f64> {
    images.iter().flat_map(|g| g.as_array()).collect()
}

fn feature_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

impl Problem<'_> {
    fn finish(&self, images: Vec<Su2>, residual: f64, opts: &TraceOptions) -> Option<Solution> {
        if !(residual < opts.accept) || !is_irreducible(&images, opts.irreducible_tol) {
            return None;
        }
        let images = gauge_fix(&images);
        let m = self.pres.meridian.eval(&images);
        let l = self.pres.longitude.eval(&images);
        let u = axis_of(&m);
        let w = l.imag();
        let beta = (w[0] * u[0] + w[1] * u[1] + w[2] * u[2]).atan2(l.a).rem_euclid(TAU);
        Some(Solution { features: features(&images), images, beta, residual })
    }
}

/// All irreducible solution classes found at a single `alpha`, plus a flag telling
/// whether every start failed to converge.
pub fn solve_at_alpha(pres: &KnotPresentation, alpha: f64, index: u64, opts: &TraceOptions) -> (Vec<Solution>, bool) {
    let prob = Problem::new(pres, alpha);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(index);
    let mut found: Vec<Solution> = Vec::new();
    let mut any_converged = false;
    for _ in 0..opts.starts {
        let start = prob.random_state(&mut rng);
        let (x, res) = prob.solve(start, opts);
        if res < opts.accept {
            any_converged = true;
        }
        if let Some(s) = prob.finish(x, res, opts) {
            if !found.iter().any(|f| feature_dist(&f.features, &s.features) < opts.dedupe_tol) {
                found.push(s);
            }
        }
    }
    found.sort_by(|a, b| a.beta.total_cmp(&b.beta));
    (found, !any_converged && opts.starts > 0)
}

struct ArcBuild {
    samples: Vec<(usize, Solution)>,
    active: bool,
}

/// Traces the pillowcase image of the irreducible characters.
pub fn trace_image(pres: &KnotPresentation, opts: &TraceOptions) -> Result<PillowcaseImage, TraceError> {
    pres.validate()?;
    if opts.resolution < 64 {
        return Err(TraceError::ResolutionTooLow(opts.resolution));
    }
    let grid = alpha_grid(opts.resolution);
    let step = PI / opts.resolution as f64;
    let per_alpha: Vec<(Vec<Solution>, bool)> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &a)| solve_at_alpha(pres, a, i as u64, opts))
        .collect();
    let diverged = per_alpha.iter().filter(|(_, d)| *d).count();
    let mut sols: Vec<Vec<Solution>> = per_alpha.into_iter().map(|(s, _)| s).collect();

    let mut arcs: Vec<ArcBuild> = Vec::new();
    for i in 0..grid.len() {
        let prob = Problem::new(pres, grid[i]);
        let mut taken = vec![false; sols[i].len()];
        for arc in arcs.iter_mut().filter(|a| a.active) {
            let (last_i, last) = arc.samples.last().unwrap();
            if *last_i + 1 != i {
                arc.active = false;
                continue;
            }
            let prev = arc.samples.len().checked_sub(2).map(|k| &arc.samples[k].1);
            let predicted: Vec<f64> = match prev {
                Some(p) => last.features.iter().zip(&p.features).map(|(a, b)| 2.0 * a - b).collect(),
                None => last.features.clone(),
            };
            let mut chosen: Option<usize> = None;
            let (x, res) = prob.solve(prob.adapt(&last.images), opts);
            if let Some(s) = prob.finish(x, res, opts) {
                if feature_dist(&s.features, &predicted) < opts.match_tol {
                    match sols[i].iter().position(|f| feature_dist(&f.features, &s.features) < opts.dedupe_tol.max(1e-5)) {
                        Some(j) => chosen = Some(j),
                        None => {
                            sols[i].push(s);
                            taken.push(false);
                            chosen = Some(sols[i].len() - 1);
                        }
                    }
                }
            }
            if chosen.is_none_or(|j| taken[j]) {
                chosen = (0..sols[i].len())
                    .filter(|&j| !taken[j])
                    .map(|j| (j, feature_dist(&sols[i][j].features, &predicted)))
                    .filter(|&(_, d)| d < opts.match_tol)
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .map(|(j, _)| j);
            }
            match chosen {
                Some(j) if !taken[j] => {
                    taken[j] = true;
                    arc.samples.push((i, sols[i][j].clone()));
                }
                _ => arc.active = false,
            }
        }
        for (j, s) in sols[i].iter().enumerate() {
            if !taken[j] {
                arcs.push(ArcBuild { samples: vec![(i, s.clone())], active: true });
            }
        }
    }

    let mut img = PillowcaseImage { partial: false, diverged_samples: diverged, ..PillowcaseImage::empty() };
    for arc in arcs {
        let pts: Vec<ImagePoint> =
            arc.samples.iter().map(|(i, s)| ImagePoint::new(grid[*i], s.beta, s.residual)).collect();
        if pts.len() < 3 {
            img.isolated_points.extend(pts);
            continue;
        }
        img.arcs.push(Arc { points: close_arc(pts, step) });
    }
    img.arcs.sort_by(|a, b| {
        let ka = (a.points[0].alpha, a.points[0].beta);
        let kb = (b.points[0].alpha, b.points[0].beta);
        ka.partial_cmp(&kb).unwrap()
    });
    img.recompute_margin();
    Ok(img)
}

/// Adds closure endpoints where the arc runs into `beta = 0` within 1.5 grid steps of its ends.
fn close_arc(mut pts: Vec<ImagePoint>, step: f64) -> Vec<ImagePoint> {
    let raw: Vec<PillowcasePoint> = pts.iter().map(ImagePoint::point).collect();
    let Ok(lift) = lift_path(&raw) else { return pts };
    let k = pts.len().min(4);
    let fit = |xs: &[(f64, f64)]| -> Option<(f64, f64)> {
        let n = xs.len() as f64;
        let mx = xs.iter().map(|p| p.0).sum::<f64>() / n;
        let my = xs.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        if sxx < 1e-300 {
            return None;
        }
        let sxy: f64 = xs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let s = sxy / sxx;
        Some((s, my - s * mx))
    };
    let crossing = |xs: &[(f64, f64)], end: (f64, f64), forward: bool| -> Option<f64> {
        let (s, c) = fit(xs)?;
        if s.abs() < 1e-9 {
            return None;
        }
        let j = (end.1 / TAU).round();
        let mut best: Option<f64> = None;
        for jj in [j - 1.0, j, j + 1.0] {
            let a = (TAU * jj - c) / s;
            let ahead = if forward { a - end.0 } else { end.0 - a };
            if (-1e-12..=1.5 * step).contains(&ahead) && best.is_none_or(|b| (b - end.0).abs() > (a - end.0).abs()) {
                best = Some(a);
            }
        }
        best
    };
    let head = &lift.points[..k];
    let tail = &lift.points[lift.points.len() - k..];
    let last_res = pts.last().unwrap().residual;
    let first_res = pts[0].residual;
    if let Some(a) = crossing(tail, *lift.points.last().unwrap(), true) {
        let mut p = ImagePoint::new(a, 0.0, last_res);
        p.closure = true;
        pts.push(p);
    }
    if let Some(a) = crossing(head, lift.points[0], false) {
        let mut p = ImagePoint::new(a, 0.0, first_res);
        p.closure = true;
        pts.insert(0, p);
    }
    pts
}

/// Image of the `(p, q)` torus knot traced from `<x, y | x^p = y^q>`.
pub fn torus_knot_image(p: i64, q: i64, opts: &TraceOptions) -> Result<PillowcaseImage, TraceError> {
    let pres = KnotPresentation::torus(p, q)?;
    trace_image(&pres, opts)
}
