//! Unit quaternions standing in for SU(2) matrices.
//!
//! `a + bi + cj + dk` is the matrix with rows `(a+ib, c+id)` and `(-c+id, a-ib)`.

use std::ops::Mul;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Su2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Su2 {
    pub const IDENTITY: Su2 = Su2 { a: 1.0, b: 0.0, c: 0.0, d: 0.0 };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Su2 { a, b, c, d }
    }

    /// `cos(angle) + sin(angle) * axis`, where `axis` is a unit vector in the imaginary quaternions.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Su2::new(c, s * axis[0], s * axis[1], s * axis[2])
    }

    /// `diag(e^{i angle}, e^{-i angle})`.
    pub fn diagonal(angle: f64) -> Self {
        Self::from_axis_angle([1.0, 0.0, 0.0], angle)
    }

    /// Exponential of the pure imaginary quaternion `v`.
    pub fn exp(v: [f64; 3]) -> Self {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if r < 1e-300 {
            return Self::IDENTITY;
        }
        Self::from_axis_angle([v[0] / r, v[1] / r, v[2] / r], r)
    }

    pub fn imag(&self) -> [f64; 3] {
        [self.b, self.c, self.d]
    }

    pub fn trace(&self) -> f64 {
        2.0 * self.a
    }

    pub fn norm(&self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Su2::new(self.a / n, self.b / n, self.c / n, self.d / n)
    }

    /// Inverse, which for a unit quaternion is the conjugate.
    pub fn inv(&self) -> Self {
        Su2::new(self.a, -self.b, -self.c, -self.d)
    }

    pub fn neg(&self) -> Self {
        Su2::new(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn powi(&self, n: i64) -> Self {
        let mut base = if n < 0 { self.inv() } else { *self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::IDENTITY;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn conj_by(&self, g: &Su2) -> Self {
        *g * *self * g.inv()
    }

    /// Euclidean distance in R^4 (half the Frobenius distance of the matrices times sqrt 2).
    pub fn dist(&self, o: &Su2) -> f64 {
        let d = [self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3]).sqrt()
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// `|gh - hg|`, zero exactly when the two elements commute.
    pub fn commutator_norm(&self, o: &Su2) -> f64 {
        (*self * *o).dist(&(*o * *self))
    }
}

impl Mul for Su2 {
    type Output = Su2;

    fn mul(self, o: Su2) -> Su2 {
        Su2 {
            a: self.a * o.a - self.b * o.b - self.c * o.c - self.d * o.d,
            b: self.a * o.b + self.b * o.a + self.c * o.d - self.d * o.c,
            c: self.a * o.c - self.b * o.d + self.c * o.a + self.d * o.b,
            d: self.a * o.d + self.b * o.c - self.c * o.b + self.d * o.a,
        }
    }
}
