//! Explicit bound functions for the three approximation stages.
//!
//! `a`, `b` bound a flow's Lipschitz behaviour and its dependence on the field; `h`
//! bounds the time-freezing error after `n` pieces; `c` bounds a single splitting
//! cycle against the flow of the sum; `d` accumulates `c` over `k` cycles.

use serde::{Deserialize, Serialize};

use crate::ShearError;

fn check(name: &'static str, value: f64) -> Result<f64, ShearError> {
    if value < 0.0 || value.is_nan() {
        Err(ShearError::NegativeArgument { name, value })
    } else {
        Ok(value)
    }
}

/// `a_0(t, K) = e^{Kt}`
pub fn a0(t: f64, k: f64) -> f64 {
    (k * t).exp()
}

/// `a_1(t, K) = K e^{3Kt}`
pub fn a1(t: f64, k: f64) -> f64 {
    k * (3.0 * k * t).exp()
}

/// `b_0(t, d, K) = d e^{Kt}`
pub fn b0(t: f64, d: f64, k: f64) -> f64 {
    d * (k * t).exp()
}

/// `b_1(t, d, K) = d (e^{(d+K)t} + K e^{2Kt}) e^{Kt}`, with `d` bounding both
/// `||X - Y||_inf` and `||DX - DY||_inf`.
pub fn b1(t: f64, d: f64, k: f64) -> f64 {
    d * (((d + k) * t).exp() + k * (2.0 * k * t).exp()) * (k * t).exp()
}

/// `f_0(t, x, K) = t x e^{Kt}`
pub fn f0(t: f64, x: f64, k: f64) -> f64 {
    t * x * (k * t).exp()
}

/// `f_1(t, x, K) = (b_1(1, x, K) + a_1(1, K) f_0(t, x, K)) e^{Kt}`
pub fn f1(t: f64, x: f64, k: f64) -> f64 {
    (b1(1.0, x, k) + a1(1.0, k) * f0(t, x, k)) * (k * t).exp()
}

fn piece(n: usize, t: f64) -> usize {
    ((t * n as f64).floor().max(0.0) as usize).min(n.saturating_sub(1))
}

/// `h_0^(n)(t, x, K) = (t - j/n) x e^{K(t - j/n)} + (x/n) sum_{i<j} e^{K(t - i/n)}`, `j = floor(nt)`.
pub fn h0(n: usize, t: f64, x: f64, k: f64) -> f64 {
    let nf = n as f64;
    let j = piece(n, t);
    let tau = t - j as f64 / nf;
    let tail: f64 = (0..j).map(|i| (k * (t - i as f64 / nf)).exp()).sum();
    tau * x * (k * tau).exp() + x / nf * tail
}

/// `h_1^(n)(t, x, K)`: the `C^1` analogue, built from `b_1`, `a_1` and `h_0^(n)`.
pub fn h1(n: usize, t: f64, x: f64, k: f64) -> f64 {
    let nf = n as f64;
    let j = piece(n, t);
    let tau = t - j as f64 / nf;
    let term = |i: usize| b1(1.0 / nf, x, k) + a1(1.0 / nf, k) * h0(n, i as f64 / nf, x, k);
    let tail: f64 = (0..j).map(|i| term(i) / nf * (k * i as f64 / nf).exp()).sum();
    tau * term(j) * (k * t).exp() + tail
}

/// `c_0^(m)`: `||phi_Z^t - phi_{W_{m-1}}^t o ... o phi_{W_0}^t||_inf <= t^2 c_0^(m)(t, M, K)`.
/// Built from `c^(2) = M e^{Kt} / 2` and `c^(q+1) = M e^{Kt} / 2 + e^{Kt} c^(q)`.
pub fn c0(m: usize, t: f64, big_m: f64, k: f64) -> f64 {
    let e = (k * t).exp();
    let mut c = 0.0;
    for _ in 1..m {
        c = 0.5 * big_m * e + e * c;
    }
    c
}

/// `c_1^(m)`. For `m = 2`: `(K c_0 e^{Kt} + M e^{Kt} / 2 + r_1 / 2) e^{Kt}`; for more modes
/// `c_1^(q+1) = c_1^(2) + e^{Kt} (c_1^(q) + t a_1(t, K) c_0^(q))`.
pub fn c1(m: usize, t: f64, big_m: f64, k: f64, r1: f64) -> f64 {
    if m < 2 {
        return 0.0;
    }
    let e = (k * t).exp();
    let two = (k * c0(2, t, big_m, k) * e + 0.5 * big_m * e + 0.5 * r1) * e;
    let mut c = two;
    for q in 2..m {
        c = two + e * (c + t * a1(t, k) * c0(q, t, big_m, k));
    }
    c
}

/// `d_0^(k)` on one interval of length `1/n` with `m` modes: the cycle error `c_0`
/// accumulated over the completed cycles, plus a displacement bound `(m + 1) K tau`
/// for a partial cycle of length `tau`.
pub fn d0(k: usize, n: usize, m: usize, t: f64, big_m: f64, kk: f64) -> f64 {
    if m < 2 {
        return 0.0;
    }
    let delta = 1.0 / (n * k) as f64;
    let j = ((t / delta + 1e-9).floor().max(0.0) as usize).min(k);
    let tau = (t - j as f64 * delta).max(0.0);
    let grid = j as f64 * delta * delta * c0(m, delta, big_m, kk) * (kk * j as f64 * delta).exp();
    grid * (kk * tau).exp() + (m as f64 + 1.0) * kk * tau
}

/// `d_1^(k)(t) = 2 (t + 1/k) (max{c_1(1)/k, 2K e^{K/k}/k} + a_1(1/k, K) d_0^(k)(1/n)) e^{Kt}`.
pub fn d1(k: usize, n: usize, m: usize, t: f64, big_m: f64, kk: f64, r1: f64) -> f64 {
    if m < 2 {
        return 0.0;
    }
    let kf = k as f64;
    let lead = (c1(m, 1.0, big_m, kk, r1) / kf).max(2.0 / kf * kk * (kk / kf).exp());
    2.0 * (t + 1.0 / kf) * (lead + a1(1.0 / kf, kk) * d0(k, n, m, 1.0 / n as f64, big_m, kk)) * (kk * t).exp()
}

/// A named bound function with its arguments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum BoundFunction {
    A0 { t: f64, k: f64 },
    A1 { t: f64, k: f64 },
    B0 { t: f64, d: f64, k: f64 },
    B1 { t: f64, d: f64, k: f64 },
    F0 { t: f64, x: f64, k: f64 },
    F1 { t: f64, x: f64, k: f64 },
    H0 { n: usize, t: f64, x: f64, k: f64 },
    H1 { n: usize, t: f64, x: f64, k: f64 },
    C0 { m: usize, t: f64, big_m: f64, k: f64 },
    C1 { m: usize, t: f64, big_m: f64, k: f64, r1: f64 },
}

impl BoundFunction {
    pub fn evaluate(&self) -> Result<f64, ShearError> {
        use BoundFunction::*;
        Ok(match *self {
            A0 { t, k } => a0(check("t", t)?, check("K", k)?),
            A1 { t, k } => a1(check("t", t)?, check("K", k)?),
            B0 { t, d, k } => b0(check("t", t)?, check("d", d)?, check("K", k)?),
            B1 { t, d, k } => b1(check("t", t)?, check("d", d)?, check("K", k)?),
            F0 { t, x, k } => f0(check("t", t)?, check("x", x)?, check("K", k)?),
            F1 { t, x, k } => f1(check("t", t)?, check("x", x)?, check("K", k)?),
            H0 { n, t, x, k } => h0(n.max(1), check("t", t)?, check("x", x)?, check("K", k)?),
            H1 { n, t, x, k } => h1(n.max(1), check("t", t)?, check("x", x)?, check("K", k)?),
            C0 { m, t, big_m, k } => c0(m, check("t", t)?, check("M", big_m)?, check("K", k)?),
            C1 { m, t, big_m, k, r1 } => c1(m, check("t", t)?, check("M", big_m)?, check("K", k)?, check("r1", r1)?),
        })
    }
}
