//! Shearing maps `p -> p + t f(w.p) v` with `v . w = 0`, and single Fourier modes.

use serde::{Deserialize, Serialize};

use crate::linalg::{add, dot, norm, outer, scale, M2, V2, ID};
use crate::ShearError;

/// `f(s) = c + sum_h (s_h sin(h s) + c_h cos(h s))`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrigProfile {
    pub constant: f64,
    /// `(harmonic, sin amplitude, cos amplitude)`
    pub terms: Vec<(i64, f64, f64)>,
}

impl TrigProfile {
    pub fn constant(c: f64) -> Self {
        TrigProfile { constant: c, terms: vec![] }
    }

    pub fn sine(h: i64, amp: f64) -> Self {
        TrigProfile { constant: 0.0, terms: vec![(h, amp, 0.0)] }
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.terms.iter().fold(self.constant, |acc, &(h, a, b)| {
            let x = h as f64 * s;
            acc + a * x.sin() + b * x.cos()
        })
    }

    pub fn deriv(&self, s: f64) -> f64 {
        self.terms.iter().fold(0.0, |acc, &(h, a, b)| {
            let (hf, x) = (h as f64, h as f64 * s);
            acc + hf * (a * x.cos() - b * x.sin())
        })
    }

    pub fn deriv2(&self, s: f64) -> f64 {
        self.terms.iter().fold(0.0, |acc, &(h, a, b)| {
            let (hf, x) = (h as f64, h as f64 * s);
            acc - hf * hf * (a * x.sin() + b * x.cos())
        })
    }

    /// Upper bound for `sup |f^(i)|`.
    pub fn sup_bound(&self, i: u32) -> f64 {
        let base = if i == 0 { self.constant.abs() } else { 0.0 };
        self.terms.iter().fold(base, |acc, &(h, a, b)| acc + (h.unsigned_abs() as f64).powi(i as i32) * a.hypot(b))
    }

    pub fn is_odd(&self) -> bool {
        self.constant == 0.0 && self.terms.iter().all(|t| t.2 == 0.0)
    }
}

/// The time-`t` flow of the field `f(w.p) v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShearingStep {
    pub v: [i64; 2],
    pub w: [i64; 2],
    pub profile: TrigProfile,
}

impl ShearingStep {
    pub fn new(v: [i64; 2], w: [i64; 2], profile: TrigProfile) -> Result<Self, ShearError> {
        if v[0] * w[0] + v[1] * w[1] != 0 {
            return Err(ShearError::NotOrthogonal { v, w });
        }
        Ok(ShearingStep { v, w, profile })
    }

    fn vf(&self) -> V2 {
        [self.v[0] as f64, self.v[1] as f64]
    }

    fn wf(&self) -> V2 {
        [self.w[0] as f64, self.w[1] as f64]
    }

    pub fn field(&self, p: V2) -> V2 {
        scale(self.vf(), self.profile.eval(dot(self.wf(), p)))
    }

    pub fn field_jacobian(&self, p: V2) -> M2 {
        let s = self.profile.deriv(dot(self.wf(), p));
        let o = outer(self.vf(), self.wf());
        [[s * o[0][0], s * o[0][1]], [s * o[1][0], s * o[1][1]]]
    }

    /// `D^2 W(p)(a, b) = f''(w.p) (w.a)(w.b) v`.
    pub fn field_hessian_apply(&self, p: V2, a: V2, b: V2) -> V2 {
        let w = self.wf();
        scale(self.vf(), self.profile.deriv2(dot(w, p)) * dot(w, a) * dot(w, b))
    }

    /// Upper bound for `sup ||D^i W||`, `i = 0, 1, 2`.
    pub fn derivative_bound(&self, i: u32) -> f64 {
        norm(self.vf()) * norm(self.wf()).powi(i as i32) * self.profile.sup_bound(i)
    }

    pub fn is_odd(&self) -> bool {
        self.profile.is_odd()
    }
}

/// Closed-form time-`t` map of a shearing step and its Jacobian `I + t f'(w.p) v w^T`.
pub fn shear_step_apply(step: &ShearingStep, t: f64, p: V2) -> (V2, M2) {
    let s = dot(step.wf(), p);
    let q = add(p, scale(step.vf(), t * step.profile.eval(s)));
    let c = t * step.profile.deriv(s);
    let o = outer(step.vf(), step.wf());
    (q, [[ID[0][0] + c * o[0][0], c * o[0][1]], [c * o[1][0], ID[1][1] + c * o[1][1]]])
}

/// `W(p) = a sin(k.p) + b cos(k.p)`; `k = 0` encodes the constant field `b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierShearField {
    pub k: [i64; 2],
    pub a: V2,
    pub b: V2,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl FourierShearField {
    pub fn eval(&self, p: V2) -> V2 {
        let x = self.k[0] as f64 * p[0] + self.k[1] as f64 * p[1];
        add(scale(self.a, x.sin()), scale(self.b, x.cos()))
    }

    /// The same field as shearing steps: one per nonconstant mode, and one per nonzero
    /// component of a constant mode.
    pub fn to_steps(&self) -> Vec<ShearingStep> {
        if self.k == [0, 0] {
            let mut out = Vec::new();
            if self.b[0] != 0.0 {
                out.push(ShearingStep { v: [1, 0], w: [0, 1], profile: TrigProfile::constant(self.b[0]) });
            }
            if self.b[1] != 0.0 {
                out.push(ShearingStep { v: [0, 1], w: [1, 0], profile: TrigProfile::constant(self.b[1]) });
            }
            return out;
        }
        let g = gcd(self.k[0], self.k[1]);
        let w = [self.k[0] / g, self.k[1] / g];
        let v = [-w[1], w[0]];
        let vf = [v[0] as f64, v[1] as f64];
        let vv = dot(vf, vf);
        let (alpha, beta) = (dot(self.a, vf) / vv, dot(self.b, vf) / vv);
        vec![ShearingStep { v, w, profile: TrigProfile { constant: 0.0, terms: vec![(g, alpha, beta)] } }]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_shear_example() {
        let step = ShearingStep::new([1, 0], [0, 1], TrigProfile::sine(1, 1.0)).unwrap();
        let (q, j) = shear_step_apply(&step, 1.0, [0.0, std::f64::consts::FRAC_PI_2]);
        assert!((q[0] - 1.0).abs() < 1e-15 && (q[1] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((crate::linalg::det(&j) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn orthogonality_enforced() {
        assert!(ShearingStep::new([1, 1], [1, 0], TrigProfile::constant(1.0)).is_err());
    }

    #[test]
    fn mode_to_step_roundtrip() {
        let m = FourierShearField { k: [2, 2], a: [0.3, -0.3], b: [-0.1, 0.1] };
        let s = &m.to_steps()[0];
        for p in [[0.1, 0.7], [2.0, -1.0]] {
            let (x, y) = (m.eval(p), s.field(p));
            assert!((x[0] - y[0]).abs() < 1e-14 && (x[1] - y[1]).abs() < 1e-14);
        }
    }
}
