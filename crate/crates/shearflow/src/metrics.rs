//! `C^0` / `C^1` distances between torus maps and structural checks of the output.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{det, grid_points, mat_sub, op_norm, torus_dist, wrap, M2, V2};
use crate::ShearError;

pub const MIN_GRID: usize = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CrDistance {
    /// `sup d(f(p), g(p))`
    pub c0: f64,
    /// `sup ||Df(p) - Dg(p)||`
    pub jacobian: f64,
}

impl CrDistance {
    pub fn c1(&self) -> f64 {
        self.c0 + self.jacobian
    }

    pub fn get(&self, r: u8) -> f64 {
        if r == 0 {
            self.c0
        } else {
            self.c1()
        }
    }

    pub fn between(a: &(V2, M2), b: &(V2, M2)) -> Self {
        CrDistance { c0: torus_dist(a.0, b.0), jacobian: op_norm(&mat_sub(&a.1, &b.1)) }
    }

    pub fn max(self, o: Self) -> Self {
        CrDistance { c0: self.c0.max(o.c0), jacobian: self.jacobian.max(o.jacobian) }
    }
}

/// Both parts of the `C^1` distance over a `grid x grid` lattice.
pub fn cr_distances<F, G>(f: F, g: G, grid: usize) -> Result<CrDistance, ShearError>
where
    F: Fn(V2) -> Result<(V2, M2), ShearError> + Sync,
    G: Fn(V2) -> Result<(V2, M2), ShearError> + Sync,
{
    if grid < MIN_GRID {
        return Err(ShearError::GridTooSmall(grid));
    }
    grid_points(grid, 0.0)
        .par_iter()
        .map(|&p| Ok(CrDistance::between(&f(p)?, &g(p)?)))
        .try_reduce(CrDistance::default, |a, b| Ok(a.max(b)))
}

/// `sup d + (r = 1) sup ||Df - Dg||`.
pub fn cr_distance<F, G>(f: F, g: G, grid: usize, r: u8) -> Result<f64, ShearError>
where
    F: Fn(V2) -> Result<(V2, M2), ShearError> + Sync,
    G: Fn(V2) -> Result<(V2, M2), ShearError> + Sync,
{
    Ok(cr_distances(f, g, grid)?.get(r))
}

/// `sup |det Df - 1|` over the grid.
pub fn jacobian_det_defect<F>(f: F, grid: usize) -> f64
where
    F: Fn(V2) -> (V2, M2) + Sync,
{
    grid_points(grid, 0.0).par_iter().map(|&p| (det(&f(p).1) - 1.0).abs()).reduce(|| 0.0, f64::max)
}

/// `sup |f(-p) + f(p)|` (mod `2 pi`) over the grid.
pub fn equivariance_defect<F>(f: F, grid: usize) -> f64
where
    F: Fn(V2) -> (V2, M2) + Sync,
{
    grid_points(grid, 0.0)
        .par_iter()
        .map(|&p| {
            let a = f(p).0;
            let b = f([-p[0], -p[1]]).0;
            wrap(a[0] + b[0]).hypot(wrap(a[1] + b[1]))
        })
        .reduce(|| 0.0, f64::max)
}

pub const HALF_LATTICE: [V2; 4] = [[0.0, 0.0], [0.0, std::f64::consts::PI], [std::f64::consts::PI, 0.0], [std::f64::consts::PI, std::f64::consts::PI]];

/// Largest displacement of the four points fixed by `p -> -p`.
pub fn fixed_point_defect<F>(f: F) -> f64
where
    F: Fn(V2) -> (V2, M2),
{
    HALF_LATTICE.iter().map(|&p| torus_dist(f(p).0, p)).fold(0.0, f64::max)
}
