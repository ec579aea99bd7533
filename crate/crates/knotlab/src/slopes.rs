//! Surgery slopes against pillowcase images: avoidance certificates, slope windows,
//! limit-slope estimates and cyclic slope families.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Signed;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::image_ops::{fit_arc_lines, ArcLine};
use crate::pillowcase::{circle_dist, PillowcaseImage, PillowcasePoint};
use crate::rational::{reconstruct, to_f64};

#[derive(Debug, Error, PartialEq)]
pub enum SlopeError {
    #[error("slope 0/0 is undefined")]
    ZeroSlope,
    #[error("cannot parse slope {0:?}")]
    Parse(String),
    #[error("the slope at infinity is not allowed here")]
    Infinite,
    #[error("segment endpoints coincide")]
    DegenerateEndpoints,
    #[error("image has no arcs")]
    NoArcs,
    #[error("every arc is curved")]
    AllCurved,
    #[error("arc slopes disagree: {0} vs {1}")]
    SlopesDisagree(f64, f64),
    #[error("fitted slope {0} is not a small-denominator rational")]
    IrrationalSlope(f64),
    #[error("slope equals r")]
    SlopeEqualsR,
    #[error("intercept {0} is not a rational multiple of 2 pi")]
    IrrationalIntercept(f64),
    #[error("invalid cable parameters ({p}, {q}, {n})")]
    InvalidCableParams { p: i64, q: i64, n: i64 },
}

/// A reduced slope `m/n` with `n >= 0`; `1/0` is the slope at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slope {
    pub m: i64,
    pub n: i64,
}

impl Slope {
    pub fn new(m: i64, n: i64) -> Result<Self, SlopeError> {
        if m == 0 && n == 0 {
            return Err(SlopeError::ZeroSlope);
        }
        let g = m.gcd(&n);
        let (mut m, mut n) = (m / g, n / g);
        if n < 0 || (n == 0 && m < 0) {
            m = -m;
            n = -n;
        }
        Ok(Slope { m, n })
    }

    pub fn integer(m: i64) -> Self {
        Slope { m, n: 1 }
    }

    pub const INFINITY: Slope = Slope { m: 1, n: 0 };

    pub fn is_infinite(&self) -> bool {
        self.n == 0
    }

    pub fn to_ratio(&self) -> Option<Ratio<i64>> {
        (self.n != 0).then(|| Ratio::new(self.m, self.n))
    }

    pub fn from_ratio(r: Ratio<i64>) -> Self {
        Slope { m: *r.numer(), n: *r.denom() }
    }

    pub fn to_f64(&self) -> f64 {
        if self.n == 0 { f64::INFINITY } else { self.m as f64 / self.n as f64 }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.n {
            0 => write!(f, "inf"),
            1 => write!(f, "{}", self.m),
            n => write!(f, "{}/{}", self.m, n),
        }
    }
}

impl FromStr for Slope {
    type Err = SlopeError;

    fn from_str(s: &str) -> Result<Self, SlopeError> {
        let t = s.trim();
        if matches!(t, "inf" | "infinity" | "∞" | "1/0") {
            return Ok(Slope::INFINITY);
        }
        let bad = || SlopeError::Parse(s.to_string());
        match t.split_once('/') {
            Some((a, b)) => Slope::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => Slope::new(t.parse().map_err(|_| bad())?, 1),
        }
    }
}

impl Serialize for Slope {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Slope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AvoidanceVerdict {
    Avoided,
    Hit,
    Inconclusive,
}

fn ser_gap<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*x)
    }
}

/// Result of testing a slope against a sampled image. This only certifies that the
/// image avoids the line `m alpha + n beta = 0 mod 2pi`; reducibles of the surgered
/// manifold are not examined.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AvoidanceCertificate {
    pub slope: Slope,
    /// Smallest distance from `m alpha + n beta` to `2 pi Z` over the sampled image
    /// (zero if a sampled segment crosses the line); infinite for an empty image.
    #[serde(serialize_with = "ser_gap")]
    pub min_gap: f64,
    pub verdict: AvoidanceVerdict,
    pub hit_threshold: f64,
    /// `min_gap` must exceed this for `avoided`; ten times the sampling slack.
    pub gap_threshold: f64,
    pub max_residual: f64,
}

/// Tests whether the image meets `m alpha + n beta = 0 mod 2pi`.
///
/// Arcs are treated as polylines through their samples (closure endpoints included) on
/// a planar lift, so a sign change of `m alpha + n beta - 2 pi k` between neighbouring
/// samples counts as a hit.
pub fn check_slope(img: &PillowcaseImage, s: Slope) -> AvoidanceCertificate {
    let (m, n) = (s.m as f64, s.n as f64);
    let max_residual = img.max_residual();
    let hit_threshold = (10.0 * (m.abs() + n) * max_residual).max(1e-9);
    let mut min_gap = f64::INFINITY;
    let mut slack: f64 = 0.0;
    for arc in &img.arcs {
        let pts: Vec<(f64, f64)> = match arc.lift() {
            Ok(l) => l.points,
            Err(_) => arc.points.iter().map(|p| (p.alpha, p.beta)).collect(),
        };
        let qs: Vec<f64> = pts.iter().map(|&(a, b)| m * a + n * b).collect();
        for q in &qs {
            min_gap = min_gap.min(circle_dist(*q, 0.0));
        }
        for w in qs.windows(2) {
            slack = slack.max((w[1] - w[0]).abs() / 2.0);
            if (w[0] / TAU).floor() != (w[1] / TAU).floor() {
                min_gap = 0.0;
            }
        }
    }
    for p in &img.isolated_points {
        min_gap = min_gap.min(circle_dist(m * p.alpha + n * p.beta, 0.0));
    }
    let gap_threshold = 10.0 * slack;
    let verdict = if min_gap <= hit_threshold {
        AvoidanceVerdict::Hit
    } else if min_gap > gap_threshold {
        AvoidanceVerdict::Avoided
    } else {
        AvoidanceVerdict::Inconclusive
    };
    AvoidanceCertificate { slope: s, min_gap, verdict, hit_threshold, gap_threshold, max_residual }
}

/// Outcome of the slope inequality for a lifted segment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WindowCheck {
    pub inside: bool,
    /// Positive when the inequality holds; its size is the slack.
    pub margin: f64,
}

/// The inequality a cyclic surgery slope must satisfy along a lifted segment of
/// irreducibles from `p0` to `p1`: with `r = (beta1 - beta0)/(alpha1 - alpha0)`,
/// `|m/n + r| < c / n` where `c = 2 pi / |alpha1 - alpha0|`; for a vertical segment,
/// `n < 2 pi / |beta1 - beta0|`.
pub fn prop31_window(p0: (f64, f64), p1: (f64, f64), s: Slope) -> Result<WindowCheck, SlopeError> {
    let (da, db) = (p1.0 - p0.0, p1.1 - p0.1);
    if da.abs() < 1e-15 && db.abs() < 1e-15 {
        return Err(SlopeError::DegenerateEndpoints);
    }
    if s.n == 0 {
        return Err(SlopeError::Infinite);
    }
    let n = s.n as f64;
    if da.abs() < 1e-15 {
        let margin = TAU / db.abs() - n;
        return Ok(WindowCheck { inside: margin > 0.0, margin });
    }
    let r = db / da;
    let c = TAU / da.abs();
    let margin = c / n - (s.m as f64 / n + r).abs();
    Ok(WindowCheck { inside: margin > 0.0, margin })
}

/// All integers `m` with `|m/n - r| <= |r|/n`.
pub fn slope_window(r: Ratio<i64>, n: i64) -> (i64, i64) {
    let nr = r * Ratio::from_integer(n);
    let ar = r.abs();
    ((nr - ar).ceil().to_integer(), (nr + ar).floor().to_integer())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitSlopeEstimate {
    /// Rational limit slope `r`; arcs have slope `-r`.
    pub r: Ratio<i64>,
    pub r_float: f64,
    pub arc_slopes: Vec<f64>,
    /// Largest deviation of an arc slope from the mean.
    pub agreement_residual: f64,
}

/// Common slope of the straight arcs of an image, reconstructed as a rational with
/// denominator at most 64.
pub fn estimate_limit_slope(img: &PillowcaseImage) -> Result<LimitSlopeEstimate, SlopeError> {
    let lines = fit_arc_lines(img, 1e-6);
    if lines.is_empty() {
        return Err(SlopeError::NoArcs);
    }
    let straight: Vec<&ArcLine> = lines.iter().filter(|l| !l.curved).collect();
    if straight.is_empty() {
        return Err(SlopeError::AllCurved);
    }
    let slopes: Vec<f64> = straight.iter().map(|l| l.slope).collect();
    let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
    let tol = 1e-6 * mean.abs().max(1.0);
    for &s in &slopes {
        if (s - slopes[0]).abs() > tol || s.is_infinite() != slopes[0].is_infinite() {
            return Err(SlopeError::SlopesDisagree(slopes[0], s));
        }
    }
    let agreement_residual = slopes.iter().map(|s| (s - mean).abs()).fold(0.0, f64::max);
    let r = reconstruct(-mean, 64, 1e-6).ok_or(SlopeError::IrrationalSlope(-mean))?;
    Ok(LimitSlopeEstimate { r_float: -mean, r, arc_slopes: slopes, agreement_residual })
}

fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-12 { r } else { x }
}

/// `0 <= (q/2)(p/q - r) + {q c / 2pi} <= 1` for the slope `p/q`; when true, the line
/// `beta = -r alpha + c` has no point with `p alpha + q beta = 0 mod 2pi` for `0 < alpha < pi`.
pub fn fractional_part_test(r: Ratio<i64>, c: f64, s: Slope) -> Result<bool, SlopeError> {
    let Some(pq) = s.to_ratio() else { return Err(SlopeError::Infinite) };
    if pq == r {
        return Err(SlopeError::SlopeEqualsR);
    }
    let q = s.n as f64;
    let lead = q / 2.0 * to_f64(&(pq - r));
    let x = snap(q * c / TAU);
    let frac = snap(x - x.floor());
    let frac = if frac >= 1.0 { frac - 1.0 } else { frac };
    let v = snap(lead + frac);
    Ok((0.0..=1.0).contains(&v))
}

/// Slopes `r + 1/(kN)` that are cyclic for all but the excluded `k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CyclicFamily {
    pub r: Ratio<i64>,
    pub n: i64,
    #[serde(rename = "N")]
    pub big_n: i64,
    /// Values of `k` (in the searched range) where an isolated point may meet the slope.
    pub excluded: Vec<i64>,
    /// Isolated points that lie on a line of slope `-r` with rational intercept.
    pub folded_points: usize,
}

impl CyclicFamily {
    pub fn member(&self, k: i64) -> Slope {
        let m = self.r * Ratio::from_integer(self.n);
        let m = m.to_integer();
        Slope::new(k * self.n * m + 1, k * self.n * self.n).expect("k != 0")
    }
}

/// Range of `k` searched for exclusions from isolated points.
pub const FAMILY_SEARCH: i64 = 1000;

/// Builds the family of cyclic slopes from a description of the image as lines of
/// slope `-r` with intercepts `c_i` plus isolated points.
pub fn generate_cyclic_family(
    r: Ratio<i64>,
    lines: &[ArcLine],
    isolated: &[PillowcasePoint],
) -> Result<CyclicFamily, SlopeError> {
    let rf = to_f64(&r);
    let mut den = *r.denom();
    let mut folded = 0;
    let mut irrational_points = Vec::new();
    for l in lines {
        let x = reconstruct(l.intercept / TAU, 64, 1e-6).ok_or(SlopeError::IrrationalIntercept(l.intercept))?;
        den = den.lcm((x * 2).denom());
    }
    for p in isolated {
        let c = p.beta + rf * p.alpha;
        match reconstruct(c.rem_euclid(TAU) / TAU, 64, 1e-6) {
            Some(x) => {
                folded += 1;
                den = den.lcm((x * 2).denom());
            }
            None => irrational_points.push((p.alpha, c)),
        }
    }
    let n = den;
    let big_n = n * n;
    let mut excluded = Vec::new();
    for k in (-FAMILY_SEARCH..=FAMILY_SEARCH).filter(|k| *k != 0) {
        for &(a, c) in &irrational_points {
            if circle_dist(a + (k * big_n) as f64 * c, 0.0) < 1e-6 {
                excluded.push(k);
            }
        }
    }
    excluded.sort_unstable();
    excluded.dedup();
    Ok(CyclicFamily { r, n, big_n, excluded, folded_points: folded })
}

/// The companion slope `p/q + 1/(q^2 n)` matching the slope `pq + 1/n` on the `(p, q)` cable.
pub fn cable_slope_transform(p: i64, q: i64, n: i64) -> Result<Slope, SlopeError> {
    if q < 2 || n < 1 || p.gcd(&q) != 1 {
        return Err(SlopeError::InvalidCableParams { p, q, n });
    }
    Slope::new(p * q * n + 1, q * q * n)
}
