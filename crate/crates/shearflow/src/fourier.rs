//! Projection of a frozen divergence-free field onto finitely many shearing modes.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::field::{ShearSumField, VectorField};
use crate::linalg::{dot, grid_points, mat_sub, norm, op_norm, scale, V2};
use crate::shear::{FourierShearField, ShearingStep};
use crate::ShearError;

pub const DIVERGENCE_TOL: f64 = 1e-8;
pub const EQUIVARIANCE_TOL: f64 = 1e-10;
const MODE_FLOOR: f64 = 1e-13;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FourierProjection {
    pub modes: Vec<FourierShearField>,
    /// `sup |X - Z|` on a grid offset from the sampling grid.
    pub residual_c0: f64,
    /// `sup |X - Z| + sup ||DX - DZ||` on the same grid.
    pub residual_c1: f64,
    /// Largest discarded component parallel to `k`.
    pub parallel_discarded: f64,
    /// Largest cosine or constant amplitude seen (before dropping, in equivariant mode).
    pub cosine_content: f64,
}

impl FourierProjection {
    pub fn steps(&self) -> Vec<ShearingStep> {
        self.modes.iter().flat_map(|m| m.to_steps()).collect()
    }

    pub fn field(&self) -> ShearSumField {
        ShearSumField { steps: self.steps() }
    }
}

/// Largest `|div X_t|` on an `n x n` grid.
pub fn max_divergence(x: &dyn VectorField, t: f64, n: usize) -> f64 {
    grid_points(n, 0.0)
        .par_iter()
        .map(|&p| {
            let j = x.jacobian(t, p);
            (j[0][0] + j[1][1]).abs()
        })
        .reduce(|| 0.0, f64::max)
}

fn fft2(data: &mut [Complex64], n: usize, planner: &mut FftPlanner<f64>) {
    let fft = planner.plan_fft_forward(n);
    for row in data.chunks_mut(n) {
        fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = data[i * n + j];
        }
        fft.process(&mut col);
        for i in 0..n {
            data[i * n + j] = col[i];
        }
    }
}

pub fn fourier_project(x: &dyn VectorField, t: f64, kmax: i64, equivariant: bool) -> Result<FourierProjection, ShearError> {
    fourier_project_with(x, t, kmax, equivariant, 7)
}

/// FFT on a `2^s` grid; keeps `|k|_inf <= kmax`, one representative per `{k, -k}` pair.
pub fn fourier_project_with(
    x: &dyn VectorField,
    t: f64,
    kmax: i64,
    equivariant: bool,
    s: u32,
) -> Result<FourierProjection, ShearError> {
    if s < 7 {
        return Err(ShearError::FftTooCoarse(s));
    }
    let n = 1usize << s;
    let div = max_divergence(x, t, n);
    if div > DIVERGENCE_TOL {
        return Err(ShearError::NotDivergenceFree(div));
    }
    let pts = grid_points(n, 0.0);
    let vals: Vec<V2> = pts.par_iter().map(|&p| x.value(t, p)).collect();
    let mut planner = FftPlanner::new();
    let mut comps: Vec<Vec<Complex64>> = (0..2).map(|c| vals.iter().map(|v| Complex64::new(v[c], 0.0)).collect()).collect();
    for c in comps.iter_mut() {
        fft2(c, n, &mut planner);
    }
    let norm_n = (n * n) as f64;
    let coef = |k1: i64, k2: i64| -> [Complex64; 2] {
        let i = k1.rem_euclid(n as i64) as usize;
        let j = k2.rem_euclid(n as i64) as usize;
        [comps[0][i * n + j] / norm_n, comps[1][i * n + j] / norm_n]
    };
    let kmax = kmax.min(n as i64 / 2 - 1);
    let mut modes = Vec::new();
    let mut parallel: f64 = 0.0;
    let mut cosine: f64 = 0.0;
    let c0 = coef(0, 0);
    let constant = [c0[0].re, c0[1].re];
    if norm(constant) > MODE_FLOOR {
        cosine = cosine.max(norm(constant));
        if !equivariant {
            modes.push(FourierShearField { k: [0, 0], a: [0.0; 2], b: constant });
        }
    }
    for k1 in 0..=kmax {
        for k2 in -kmax..=kmax {
            if k1 == 0 && k2 <= 0 {
                continue;
            }
            let c = coef(k1, k2);
            let mut a = [-2.0 * c[0].im, -2.0 * c[1].im];
            let mut b = [2.0 * c[0].re, 2.0 * c[1].re];
            let kf = [k1 as f64, k2 as f64];
            let kk = dot(kf, kf);
            for v in [&mut a, &mut b] {
                let par = dot(*v, kf) / kk;
                parallel = parallel.max(par.abs() * kk.sqrt());
                *v = [v[0] - par * kf[0], v[1] - par * kf[1]];
            }
            if norm(b) > MODE_FLOOR {
                cosine = cosine.max(norm(b));
            }
            if equivariant {
                b = [0.0; 2];
            }
            if norm(a) > MODE_FLOOR || norm(b) > MODE_FLOOR {
                let clean = |v: V2| if norm(v) > MODE_FLOOR { v } else { [0.0; 2] };
                modes.push(FourierShearField { k: [k1, k2], a: clean(a), b: clean(b) });
            }
        }
    }
    if equivariant && cosine > EQUIVARIANCE_TOL {
        return Err(ShearError::NotEquivariant(cosine));
    }
    let z = ShearSumField { steps: modes.iter().flat_map(|m| m.to_steps()).collect() };
    let (r0, r1) = grid_points(n, 0.5)
        .par_iter()
        .map(|&p| {
            let d = crate::linalg::add(x.value(t, p), scale(z.value(0.0, p), -1.0));
            let dj = mat_sub(&x.jacobian(t, p), &z.jacobian(0.0, p));
            (norm(d), op_norm(&dj))
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    Ok(FourierProjection { modes, residual_c0: r0, residual_c1: r0 + r1, parallel_discarded: parallel, cosine_content: cosine })
}
