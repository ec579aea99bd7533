//! Tiny fixed-size helpers for points and 2x2 matrices.

pub type V2 = [f64; 2];
pub type M2 = [[f64; 2]; 2];

pub const ID: M2 = [[1.0, 0.0], [0.0, 1.0]];
pub const TAU: f64 = std::f64::consts::TAU;

pub fn add(a: V2, b: V2) -> V2 {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn scale(a: V2, s: f64) -> V2 {
    [a[0] * s, a[1] * s]
}

pub fn dot(a: V2, b: V2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn norm(a: V2) -> f64 {
    a[0].hypot(a[1])
}

pub fn mat_vec(m: &M2, v: V2) -> V2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

pub fn mat_mul(a: &M2, b: &M2) -> M2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn mat_add(a: &M2, b: &M2) -> M2 {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

pub fn mat_sub(a: &M2, b: &M2) -> M2 {
    [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
}

pub fn mat_scale(a: &M2, s: f64) -> M2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn det(a: &M2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Outer product `u v^T`.
pub fn outer(u: V2, v: V2) -> M2 {
    [[u[0] * v[0], u[0] * v[1]], [u[1] * v[0], u[1] * v[1]]]
}

/// Spectral norm.
pub fn op_norm(a: &M2) -> f64 {
    let p = a[0][0] * a[0][0] + a[1][0] * a[1][0];
    let q = a[0][1] * a[0][1] + a[1][1] * a[1][1];
    let r = a[0][0] * a[0][1] + a[1][0] * a[1][1];
    let tr = p + q;
    let disc = ((p - q) * (p - q) + 4.0 * r * r).sqrt();
    (0.5 * (tr + disc)).max(0.0).sqrt()
}

/// Representative of `x` modulo `2 pi` in `(-pi, pi]`.
pub fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > std::f64::consts::PI {
        y - TAU
    } else {
        y
    }
}

/// Flat distance on the torus.
pub fn torus_dist(a: V2, b: V2) -> f64 {
    wrap(a[0] - b[0]).hypot(wrap(a[1] - b[1]))
}

/// `n x n` lattice `(2 pi i / n, 2 pi j / n)` shifted by `offset` cells.
pub fn grid_points(n: usize, offset: f64) -> Vec<V2> {
    let h = TAU / n as f64;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push([(i as f64 + offset) * h, (j as f64 + offset) * h]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_norm_matches_known() {
        assert!((op_norm(&[[0.0, 2.0], [0.0, 0.0]]) - 2.0).abs() < 1e-15);
        assert!((op_norm(&ID) - 1.0).abs() < 1e-15);
        assert!((op_norm(&[[3.0, 0.0], [0.0, -4.0]]) - 4.0).abs() < 1e-15);
    }
}
