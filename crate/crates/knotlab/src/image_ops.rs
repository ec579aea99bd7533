//! Line fits, satellite and connected-sum transforms of pillowcase images.

use std::f64::consts::{PI, TAU};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pillowcase::{iota_canonicalize, wrap_tau, Arc, ImagePoint, PillowcaseImage};
use crate::rational::reconstruct;

#[derive(Debug, Error, PartialEq)]
pub enum ImageOpError {
    #[error("satellite winding number must be nonzero")]
    ZeroWinding,
    #[error("invalid cable parameters ({0}, {1})")]
    InvalidCable(i64, i64),
}

/// Least-squares line through one arc of an image, in a planar lift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcLine {
    /// `d beta / d alpha`; infinite for a vertical arc.
    pub slope: f64,
    /// The slope as a small-denominator rational, when it is one.
    pub slope_rational: Option<Ratio<i64>>,
    /// `beta` at `alpha = 0` reduced into `[0, 2pi)`; for a vertical arc the `alpha` value.
    pub intercept: f64,
    pub alpha_range: (f64, f64),
    /// Largest distance of a sample from the fitted line.
    pub residual: f64,
    pub curved: bool,
    pub samples: usize,
}

impl ArcLine {
    pub fn is_vertical(&self) -> bool {
        self.slope.is_infinite()
    }
}

/// Fits a line to each arc of the image (isolated points are skipped).
/// Arcs whose residual exceeds `tol` are flagged as curved; arcs with fewer than 8
/// samples are fitted but always flagged.
pub fn fit_arc_lines(img: &PillowcaseImage, tol: f64) -> Vec<ArcLine> {
    img.arcs.iter().filter_map(|a| fit_arc(a, tol)).collect()
}

pub fn fit_arc(arc: &Arc, tol: f64) -> Option<ArcLine> {
    let lift = arc.lift().ok()?;
    let pts = &lift.points;
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let amin = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let amax = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let range = (wrap_alpha(amin).min(wrap_alpha(amax)), wrap_alpha(amin).max(wrap_alpha(amax)));
    if amax - amin < 1e-9 {
        let mean = pts.iter().map(|p| p.0).sum::<f64>() / n;
        return Some(ArcLine {
            slope: f64::INFINITY,
            slope_rational: None,
            intercept: mean,
            alpha_range: range,
            residual: 0.0,
            curved: pts.len() < 8,
            samples: pts.len(),
        });
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let c = my - slope * mx;
    let residual = pts.iter().map(|p| (p.1 - slope * p.0 - c).abs()).fold(0.0, f64::max);
    Some(ArcLine {
        slope,
        slope_rational: reconstruct(slope, 64, 1e-6),
        intercept: wrap_tau(c),
        alpha_range: range,
        residual,
        curved: residual > tol || pts.len() < 8,
        samples: pts.len(),
    })
}

fn wrap_alpha(a: f64) -> f64 {
    iota_canonicalize(a, 0.0).alpha
}

/// Largest number of full turns in `beta` made by an arc that starts and ends on the
/// reducible line `beta = 0`. Zero for an empty image.
pub fn connecting_path_winding(img: &PillowcaseImage) -> i64 {
    img.arcs
        .iter()
        .filter(|a| a.points.len() >= 2 && a.points[0].closure && a.points.last().unwrap().closure)
        .filter_map(|a| a.lift().ok())
        .map(|l| {
            let d = l.points.last().unwrap().1 - l.points[0].1;
            (d.abs() / TAU).round() as i64
        })
        .max()
        .unwrap_or(0)
}

/// Pattern data of a satellite: winding number and optional cable parameters `(p, q)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SatelliteSpec {
    pub winding: i64,
    pub cable: Option<(i64, i64)>,
}

impl SatelliteSpec {
    pub fn winding(w: i64) -> Self {
        SatelliteSpec { winding: w, cable: None }
    }

    /// The `(p, q)` cable, with winding number `q`.
    pub fn cable(p: i64, q: i64) -> Result<Self, ImageOpError> {
        if q < 2 || num_integer::gcd(p, q) != 1 {
            return Err(ImageOpError::InvalidCable(p, q));
        }
        Ok(SatelliteSpec { winding: q, cable: Some((p, q)) })
    }
}

/// The part of a satellite's image coming from irreducibles of the companion:
/// `((alpha + 2 pi k) / w, w beta)` for `k = 0 .. |w| - 1`. Always tagged partial.
pub fn satellite_image(img: &PillowcaseImage, spec: &SatelliteSpec) -> Result<PillowcaseImage, ImageOpError> {
    let w = spec.winding;
    if w == 0 {
        return Err(ImageOpError::ZeroWinding);
    }
    let wf = w as f64;
    let map = |p: &ImagePoint, k: i64| {
        let q = iota_canonicalize((p.alpha + TAU * k as f64) / wf, wf * p.beta);
        ImagePoint { alpha: q.alpha, beta: q.beta, ..*p }
    };
    let mut out = PillowcaseImage { partial: true, diverged_samples: img.diverged_samples, ..PillowcaseImage::empty() };
    for k in 0..w.abs() {
        for a in &img.arcs {
            out.arcs.push(Arc { points: a.points.iter().map(|p| map(p, k)).collect() });
        }
        out.isolated_points.extend(img.isolated_points.iter().map(|p| map(p, k)));
    }
    out.recompute_margin();
    Ok(out)
}

/// Lifted samples of an arc sorted by `alpha`.
fn sorted_lift(a: &Arc) -> Option<Vec<(f64, f64)>> {
    let mut pts = a.lift().ok()?.points;
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    Some(pts)
}

fn interp(pts: &[(f64, f64)], a: f64) -> Option<f64> {
    if pts.is_empty() || a < pts[0].0 - 1e-12 || a > pts[pts.len() - 1].0 + 1e-12 {
        return None;
    }
    let j = pts.partition_point(|p| p.0 < a);
    if j == 0 {
        return Some(pts[0].1);
    }
    if j == pts.len() {
        return Some(pts[j - 1].1);
    }
    let (a0, b0) = pts[j - 1];
    let (a1, b1) = pts[j];
    if a1 - a0 < 1e-15 {
        return Some(b0);
    }
    Some(b0 + (b1 - b0) * (a - a0) / (a1 - a0))
}

/// Image of a connected sum built from the two summands: sums `beta1 + beta2` over
/// common `alpha` values of pairs of arcs, together with both input images (gluings
/// with a reducible on one side). Always tagged partial.
pub fn connected_sum_image(img1: &PillowcaseImage, img2: &PillowcaseImage) -> PillowcaseImage {
    let mut out = PillowcaseImage { partial: true, ..PillowcaseImage::empty() };
    let lifts1: Vec<Vec<(f64, f64)>> = img1.arcs.iter().filter_map(sorted_lift).collect();
    let lifts2: Vec<Vec<(f64, f64)>> = img2.arcs.iter().filter_map(sorted_lift).collect();
    for l1 in &lifts1 {
        for l2 in &lifts2 {
            let lo = l1[0].0.max(l2[0].0);
            let hi = l1[l1.len() - 1].0.min(l2[l2.len() - 1].0);
            if hi - lo < 1e-12 {
                continue;
            }
            let mut alphas: Vec<f64> =
                l1.iter().chain(l2.iter()).map(|p| p.0).filter(|&a| a >= lo - 1e-15 && a <= hi + 1e-15).collect();
            alphas.sort_by(f64::total_cmp);
            alphas.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
            let pts: Vec<ImagePoint> = alphas
                .iter()
                .filter_map(|&a| Some(ImagePoint::new(a, interp(l1, a)? + interp(l2, a)?, 0.0)))
                .collect();
            if pts.len() >= 2 {
                out.arcs.push(Arc { points: pts });
            }
        }
    }
    // isolated points of one summand against arcs of the other
    for (iso, lifts) in [(&img1.isolated_points, &lifts2), (&img2.isolated_points, &lifts1)] {
        for p in iso {
            for l in lifts.iter() {
                if let Some(b) = interp(l, p.alpha) {
                    out.isolated_points.push(ImagePoint::new(p.alpha, p.beta + b, p.residual));
                }
            }
        }
    }
    for img in [img1, img2] {
        out.arcs.extend(img.arcs.iter().cloned());
        out.isolated_points.extend(img.isolated_points.iter().cloned());
        out.diverged_samples += img.diverged_samples;
    }
    out.recompute_margin();
    if out.is_empty() {
        out.alpha_margin = PI / 2.0;
    }
    out
}
