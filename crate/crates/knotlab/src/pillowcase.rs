//! Pillowcase coordinates, the involution quotient and planar lifts.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::su2::Su2;

/// Tolerance used when comparing angles and when testing the corner identifications.
pub const ANGLE_TOL: f64 = 1e-9;
/// Tolerance on `|ml - lm|` for pillowcase coordinates.
pub const COMMUTE_TOL: f64 = 1e-9;
const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum PillowcaseError {
    #[error("elements do not commute: |ml - lm| = {0:e}")]
    NonCommuting(f64),
    #[error("element is not unit norm: |g| = {0}")]
    NotUnit(f64),
    #[error("consecutive samples {index} and {next} are {distance} apart (limit pi/4)", next = index + 1)]
    SamplingTooCoarse { index: usize, distance: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PillowcasePoint {
    pub alpha: f64,
    pub beta: f64,
}

impl PillowcasePoint {
    /// Builds the canonical representative of `(alpha, beta)`.
    pub fn new(alpha: f64, beta: f64) -> Self {
        iota_canonicalize(alpha, beta)
    }

    /// True at the two corners the image of a knot group can meet, `(0,0)` and `(pi,0)`.
    pub fn is_corner(&self) -> bool {
        (self.alpha < ANGLE_TOL || (PI - self.alpha) < ANGLE_TOL) && circle_dist(self.beta, 0.0) < ANGLE_TOL
    }

    /// Distance in the flat metric of the pillowcase quotient.
    pub fn dist(&self, o: &PillowcasePoint) -> f64 {
        let mut best = f64::INFINITY;
        for (a, b) in [(o.alpha, o.beta), (-o.alpha, -o.beta)] {
            for k in -1..=1 {
                for l in -1..=1 {
                    let da = self.alpha - (a + TAU * k as f64);
                    let db = self.beta - (b + TAU * l as f64);
                    best = best.min(da.hypot(db));
                }
            }
        }
        best
    }
}

/// Reduces `x` into `[0, 2pi)`.
pub fn wrap_tau(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU { 0.0 } else { r }
}

/// Distance from `x` to `y` on the circle `R / 2piZ`.
pub fn circle_dist(x: f64, y: f64) -> f64 {
    let d = wrap_tau(x - y);
    d.min(TAU - d)
}

/// Reduces mod 2pi, applies `(a, b) -> (2pi - a, 2pi - b)` when `a > pi`, then
/// the edge identifications `(0, b) ~ (0, 2pi - b)` and `(pi, b) ~ (pi, 2pi - b)`.
pub fn iota_canonicalize(alpha: f64, beta: f64) -> PillowcasePoint {
    let mut a = wrap_tau(alpha);
    let mut b = wrap_tau(beta);
    if a > PI {
        a = TAU - a;
        b = wrap_tau(TAU - b);
    }
    if (a < ANGLE_TOL || PI - a < ANGLE_TOL) && b > PI {
        b = TAU - b;
    }
    if a < ANGLE_TOL {
        a = 0.0;
    } else if PI - a < ANGLE_TOL {
        a = PI;
    }
    if TAU - b < ANGLE_TOL {
        b = 0.0;
    }
    PillowcasePoint { alpha: a, beta: b }
}

/// The symmetry `(a, b) -> (pi - a, 2pi - b)` induced by twisting with the central character.
pub fn central_twist(p: PillowcasePoint) -> PillowcasePoint {
    iota_canonicalize(PI - p.alpha, TAU - p.beta)
}

/// Coordinates of a commuting pair `(m, l)` = (meridian, longitude) image.
pub fn pillowcase_coords(m: &Su2, l: &Su2) -> Result<PillowcasePoint, PillowcaseError> {
    for g in [m, l] {
        let n = g.norm();
        if (n - 1.0).abs() > UNIT_TOL.max(1e-10) {
            return Err(PillowcaseError::NotUnit(n));
        }
    }
    let c = m.commutator_norm(l);
    if c > COMMUTE_TOL {
        return Err(PillowcaseError::NonCommuting(c));
    }
    let alpha = m.a.clamp(-1.0, 1.0).acos();
    let v = m.imag();
    let vn = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if vn < 1e-7 {
        // m = +-1: l is only determined up to conjugacy, so use its rotation angle.
        let beta = l.a.clamp(-1.0, 1.0).acos();
        return Ok(iota_canonicalize(alpha, beta));
    }
    let u = [v[0] / vn, v[1] / vn, v[2] / vn];
    let w = l.imag();
    let s = w[0] * u[0] + w[1] * u[1] + w[2] * u[2];
    let beta = s.atan2(l.a);
    Ok(iota_canonicalize(alpha, beta))
}

/// A continuous branch of a pillowcase path in the plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarLift {
    pub points: Vec<(f64, f64)>,
}

impl PlanarLift {
    pub fn project(&self) -> Vec<PillowcasePoint> {
        self.points.iter().map(|&(a, b)| iota_canonicalize(a, b)).collect()
    }
}

/// Lifts a sampled pillowcase path to the plane, choosing at each step the
/// preimage closest to the previous lifted point. The first point is lifted to itself.
pub fn lift_path(arc: &[PillowcasePoint]) -> Result<PlanarLift, PillowcaseError> {
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(arc.len());
    for (i, p) in arc.iter().enumerate() {
        let Some(&(pa, pb)) = points.last() else {
            points.push((p.alpha, p.beta));
            continue;
        };
        let mut best = (f64::INFINITY, (0.0, 0.0));
        for sign in [1.0, -1.0] {
            let a0 = sign * p.alpha;
            let b0 = sign * p.beta;
            let ka = ((pa - a0) / TAU).round();
            let kb = ((pb - b0) / TAU).round();
            for da in -1..=1 {
                for db in -1..=1 {
                    let a = a0 + TAU * (ka + da as f64);
                    let b = b0 + TAU * (kb + db as f64);
                    let d = (a - pa).abs().max((b - pb).abs());
                    if d < best.0 {
                        best = (d, (a, b));
                    }
                }
            }
        }
        if best.0 >= PI / 4.0 {
            return Err(PillowcaseError::SamplingTooCoarse { index: i - 1, distance: best.0 });
        }
        points.push(best.1);
    }
    Ok(PlanarLift { points })
}

/// One sample of a traced arc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImagePoint {
    pub alpha: f64,
    pub beta: f64,
    /// Relator residual of the solve that produced the sample (0 for closed-form points).
    pub residual: f64,
    /// Set for endpoints that lie on `beta = 0` in the closure of the irreducibles.
    #[serde(default)]
    pub closure: bool,
}

impl ImagePoint {
    pub fn new(alpha: f64, beta: f64, residual: f64) -> Self {
        let p = iota_canonicalize(alpha, beta);
        ImagePoint { alpha: p.alpha, beta: p.beta, residual, closure: false }
    }

    pub fn point(&self) -> PillowcasePoint {
        PillowcasePoint { alpha: self.alpha, beta: self.beta }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub points: Vec<ImagePoint>,
}

impl Arc {
    pub fn pillowcase_points(&self) -> Vec<PillowcasePoint> {
        self.points.iter().map(ImagePoint::point).collect()
    }

    pub fn lift(&self) -> Result<PlanarLift, PillowcaseError> {
        lift_path(&self.pillowcase_points())
    }

    pub fn max_residual(&self) -> f64 {
        self.points.iter().map(|p| p.residual).fold(0.0, f64::max)
    }
}

/// Pillowcase image of the irreducible characters of a knot group.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PillowcaseImage {
    pub arcs: Vec<Arc>,
    pub isolated_points: Vec<ImagePoint>,
    /// All irreducible points satisfy `alpha_margin < alpha < pi - alpha_margin`.
    pub alpha_margin: f64,
    /// Set when the image is known to be only part of the full image.
    #[serde(default)]
    pub partial: bool,
    /// Per-sample solver failures, kept for diagnostics.
    #[serde(default)]
    pub diverged_samples: usize,
}

impl PillowcaseImage {
    pub fn empty() -> Self {
        PillowcaseImage { alpha_margin: PI / 2.0, ..Default::default() }
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.iter().all(|a| a.points.is_empty()) && self.isolated_points.is_empty()
    }

    pub fn all_points(&self) -> impl Iterator<Item = &ImagePoint> {
        self.arcs.iter().flat_map(|a| a.points.iter()).chain(self.isolated_points.iter())
    }

    pub fn max_residual(&self) -> f64 {
        self.all_points().map(|p| p.residual).fold(0.0, f64::max)
    }

    /// Recomputes `alpha_margin` as half the smallest distance of a point to the edges.
    pub fn recompute_margin(&mut self) {
        let m = self
            .all_points()
            .map(|p| p.alpha.min(PI - p.alpha))
            .fold(f64::INFINITY, f64::min);
        self.alpha_margin = if m.is_finite() { 0.5 * m } else { PI / 2.0 };
    }

    /// Applies a pointwise map, keeping residuals and closure tags.
    pub fn map_points(&self, f: impl Fn(PillowcasePoint) -> PillowcasePoint) -> PillowcaseImage {
        let g = |p: &ImagePoint| {
            let q = f(p.point());
            ImagePoint { alpha: q.alpha, beta: q.beta, ..*p }
        };
        let mut out = PillowcaseImage {
            arcs: self.arcs.iter().map(|a| Arc { points: a.points.iter().map(g).collect() }).collect(),
            isolated_points: self.isolated_points.iter().map(g).collect(),
            alpha_margin: self.alpha_margin,
            partial: self.partial,
            diverged_samples: self.diverged_samples,
        };
        out.recompute_margin();
        out
    }

    /// CSV rows `arc_id,alpha,beta,residual`; isolated points use arc id `-1`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("arc_id,alpha,beta,residual\n");
        for (i, a) in self.arcs.iter().enumerate() {
            for p in &a.points {
                s.push_str(&format!("{},{},{},{:e}\n", i, p.alpha, p.beta, p.residual));
            }
        }
        for p in &self.isolated_points {
            s.push_str(&format!("-1,{},{},{:e}\n", p.alpha, p.beta, p.residual));
        }
        s
    }
}

/// Reflection across `beta = pi`, the image of the mirror knot.
pub fn mirror_image(img: &PillowcaseImage) -> PillowcaseImage {
    img.map_points(|p| iota_canonicalize(p.alpha, TAU - p.beta))
}

/// Hausdorff distance between the sample sets of two images in the pillowcase metric.
/// Returns 0 for two empty images and infinity if exactly one is empty.
pub fn hausdorff(a: &PillowcaseImage, b: &PillowcaseImage) -> f64 {
    let pa: Vec<PillowcasePoint> = a.all_points().map(ImagePoint::point).collect();
    let pb: Vec<PillowcasePoint> = b.all_points().map(ImagePoint::point).collect();
    match (pa.is_empty(), pb.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return f64::INFINITY,
        _ => {}
    }
    let directed = |x: &[PillowcasePoint], y: &[PillowcasePoint]| {
        x.iter()
            .map(|p| y.iter().map(|q| p.dist(q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(&pa, &pb).max(directed(&pb, &pa))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_examples() {
        let p = iota_canonicalize(1.5 * PI, 0.5 * PI);
        assert!((p.alpha - 0.5 * PI).abs() < 1e-12 && (p.beta - 1.5 * PI).abs() < 1e-12);
        let p = iota_canonicalize(0.0, 1.5 * PI);
        assert!(p.alpha == 0.0 && (p.beta - 0.5 * PI).abs() < 1e-12);
    }

    #[test]
    fn twist_examples() {
        let p = central_twist(PillowcasePoint::new(PI / 6.0, 0.0));
        assert!((p.alpha - 5.0 * PI / 6.0).abs() < 1e-12 && p.beta == 0.0);
        let p = central_twist(PillowcasePoint::new(PI / 2.0, PI));
        assert!((p.alpha - PI / 2.0).abs() < 1e-12 && (p.beta - PI).abs() < 1e-12);
    }
}
