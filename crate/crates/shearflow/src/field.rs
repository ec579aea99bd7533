//! Vector fields on the torus, possibly time dependent.

use std::sync::Arc;

use crate::linalg::{add, mat_add, scale, M2, V2};
use crate::shear::ShearingStep;

pub trait VectorField: Send + Sync {
    fn value(&self, t: f64, p: V2) -> V2;
    fn jacobian(&self, t: f64, p: V2) -> M2;
}

/// One term `alpha sin(k.p) + beta cos(k.p)` of a Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianMode {
    pub k: [i64; 2],
    pub alpha: f64,
    pub beta: f64,
}

/// `X_t = (dH/dy, -dH/dx)` for `H(t, p) = g(t) h(p)`, `h` a trigonometric polynomial.
#[derive(Clone)]
pub struct HamiltonianField {
    pub modes: Vec<HamiltonianMode>,
    pub g: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl HamiltonianField {
    pub fn new(modes: Vec<HamiltonianMode>, g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        HamiltonianField { modes, g: Arc::new(g) }
    }

    /// `H = g(t) sin x sin y = g(t) (cos(x - y) - cos(x + y)) / 2`.
    pub fn sin_sin(g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(
            vec![
                HamiltonianMode { k: [1, -1], alpha: 0.0, beta: 0.5 },
                HamiltonianMode { k: [1, 1], alpha: 0.0, beta: -0.5 },
            ],
            g,
        )
    }

    /// The test field `H = (1 + t/2) sin x sin y`.
    pub fn test_field() -> Self {
        Self::sin_sin(|t| 1.0 + 0.5 * t)
    }
}

impl VectorField for HamiltonianField {
    fn value(&self, t: f64, p: V2) -> V2 {
        let g = (self.g)(t);
        let mut out = [0.0; 2];
        for m in &self.modes {
            let (k1, k2) = (m.k[0] as f64, m.k[1] as f64);
            let x = k1 * p[0] + k2 * p[1];
            let c = m.alpha * x.cos() - m.beta * x.sin();
            out = add(out, [c * k2, -c * k1]);
        }
        scale(out, g)
    }

    fn jacobian(&self, t: f64, p: V2) -> M2 {
        let g = (self.g)(t);
        let mut out = [[0.0; 2]; 2];
        for m in &self.modes {
            let (k1, k2) = (m.k[0] as f64, m.k[1] as f64);
            let x = k1 * p[0] + k2 * p[1];
            let d = -(m.alpha * x.sin() + m.beta * x.cos()) * g;
            out = mat_add(&out, &[[d * k2 * k1, d * k2 * k2], [-d * k1 * k1, -d * k1 * k2]]);
        }
        out
    }
}

/// `X_{t0}` viewed as an autonomous field.
pub struct FrozenField<'a> {
    pub inner: &'a dyn VectorField,
    pub t0: f64,
}

impl VectorField for FrozenField<'_> {
    fn value(&self, _t: f64, p: V2) -> V2 {
        self.inner.value(self.t0, p)
    }

    fn jacobian(&self, _t: f64, p: V2) -> M2 {
        self.inner.jacobian(self.t0, p)
    }
}

/// An autonomous sum of shearing fields.
#[derive(Clone, Debug, Default)]
pub struct ShearSumField {
    pub steps: Vec<ShearingStep>,
}

impl VectorField for ShearSumField {
    fn value(&self, _t: f64, p: V2) -> V2 {
        self.steps.iter().fold([0.0; 2], |acc, s| add(acc, s.field(p)))
    }

    fn jacobian(&self, _t: f64, p: V2) -> M2 {
        self.steps.iter().fold([[0.0; 2]; 2], |acc, s| mat_add(&acc, &s.field_jacobian(p)))
    }
}

/// Central-difference estimate of `sup ||D^2 X_t||` contributions at `p`
/// (Frobenius norm of the two partial derivatives of the Jacobian).
pub fn second_derivative_norm(x: &dyn VectorField, t: f64, p: V2) -> f64 {
    let h = 1e-5;
    let mut acc = 0.0;
    for e in [[h, 0.0], [0.0, h]] {
        let a = x.jacobian(t, add(p, e));
        let b = x.jacobian(t, add(p, scale(e, -1.0)));
        for i in 0..2 {
            for j in 0..2 {
                let d = (a[i][j] - b[i][j]) / (2.0 * h);
                acc += d * d;
            }
        }
    }
    acc.sqrt()
}
