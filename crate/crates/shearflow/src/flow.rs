//! Reference integration of flows and the piecewise constructions built from
//! frozen fields and shearing steps.

use serde::{Deserialize, Serialize};

use crate::field::VectorField;
use crate::linalg::{add, mat_add, mat_mul, mat_scale, scale, M2, V2, ID};
use crate::shear::{shear_step_apply, ShearingStep};
use crate::ShearError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceOptions {
    /// Target for the step-doubling error estimate.
    pub tol: f64,
    pub min_steps: usize,
    pub max_steps: usize,
}

impl Default for ReferenceOptions {
    fn default() -> Self {
        ReferenceOptions { tol: 1e-10, min_steps: 8, max_steps: 1 << 20 }
    }
}

type State = (V2, M2);

fn deriv(x: &dyn VectorField, t: f64, s: &State) -> State {
    let j = x.jacobian(t, s.0);
    (x.value(t, s.0), mat_mul(&j, &s.1))
}

fn axpy(s: &State, h: f64, d: &State) -> State {
    (add(s.0, scale(d.0, h)), mat_add(&s.1, &mat_scale(&d.1, h)))
}

/// Classical RK4 with `steps` equal steps, integrating the variational equation alongside.
pub fn rk4_fixed(x: &dyn VectorField, t0: f64, t1: f64, p: V2, steps: usize) -> (V2, M2) {
    let h = (t1 - t0) / steps as f64;
    let mut s: State = (p, ID);
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let k1 = deriv(x, t, &s);
        let k2 = deriv(x, t + 0.5 * h, &axpy(&s, 0.5 * h, &k1));
        let k3 = deriv(x, t + 0.5 * h, &axpy(&s, 0.5 * h, &k2));
        let k4 = deriv(x, t + h, &axpy(&s, h, &k3));
        let mut d = axpy(&k1, 2.0, &k2);
        d = axpy(&d, 2.0, &k3);
        d = axpy(&d, 1.0, &k4);
        s = axpy(&s, h / 6.0, &d);
    }
    s
}

fn state_diff(a: &State, b: &State) -> f64 {
    let mut m = (a.0[0] - b.0[0]).abs().max((a.0[1] - b.0[1]).abs());
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a.1[i][j] - b.1[i][j]).abs());
        }
    }
    m
}

/// Flow of a (possibly time dependent) field from `t0` to `t1` with its Jacobian,
/// integrated together with the variational equation. Steps double until the
/// Richardson estimate `|y_2N - y_N| / 15` falls below `opts.tol`.
pub fn flow_between(x: &dyn VectorField, t0: f64, t1: f64, p: V2, opts: &ReferenceOptions) -> Result<(V2, M2), ShearError> {
    if t1 == t0 {
        return Ok((p, ID));
    }
    let mut n = opts.min_steps.max(((t1 - t0).abs() * 32.0).ceil() as usize);
    let mut coarse = rk4_fixed(x, t0, t1, p, n);
    loop {
        let fine = rk4_fixed(x, t0, t1, p, 2 * n);
        if state_diff(&fine, &coarse) / 15.0 < opts.tol {
            return Ok(fine);
        }
        n *= 2;
        if n > opts.max_steps {
            return Err(ShearError::StepSizeUnderflow { steps: n });
        }
        coarse = fine;
    }
}

/// `(psi^t(p), D psi^t(p))` for the flow starting at time 0.
pub fn reference_flow(x: &dyn VectorField, t: f64, p: V2, opts: &ReferenceOptions) -> Result<(V2, M2), ShearError> {
    flow_between(x, 0.0, t, p, opts)
}

/// `i` with `i/n <= t <= (i+1)/n`, clamped to `0..n`.
fn interval(t: f64, n: usize) -> usize {
    ((t * n as f64).floor().max(0.0) as usize).min(n - 1)
}

/// Composition of flows of autonomous fields `X_0, ..., X_{n-1}`, each for time `1/n`,
/// stopped at time `t`.
pub fn theta_flow(fields: &[&dyn VectorField], t: f64, p: V2, opts: &ReferenceOptions) -> Result<(V2, M2), ShearError> {
    let n = fields.len();
    let i = interval(t, n);
    let mut q = p;
    let mut jac = ID;
    for (j, x) in fields.iter().enumerate().take(i + 1) {
        let dt = if j < i { 1.0 / n as f64 } else { t - i as f64 / n as f64 };
        let (q2, dj) = flow_between(*x, 0.0, dt, q, opts)?;
        q = q2;
        jac = mat_mul(&dj, &jac);
    }
    Ok((q, jac))
}

/// For `t in [0, 1/n]`: cycle `k` times through the `m` modes, each flowed at speed `m`
/// for a time slot of length `1/(k m n)`.
pub fn xi_flow(modes: &[ShearingStep], k: usize, n: usize, t: f64, p: V2) -> (V2, M2) {
    let m = modes.len();
    if m == 0 {
        return (p, ID);
    }
    let slot = 1.0 / (k * m * n) as f64;
    let full = ((t / slot).floor().max(0.0) as usize).min(k * m);
    let mut q = p;
    let mut jac = ID;
    for s in 0..full {
        let (q2, dj) = shear_step_apply(&modes[s % m], 1.0 / (k * n) as f64, q);
        q = q2;
        jac = mat_mul(&dj, &jac);
    }
    let rest = t - full as f64 * slot;
    if full < k * m && rest > 0.0 {
        let (q2, dj) = shear_step_apply(&modes[full % m], m as f64 * rest, q);
        q = q2;
        jac = mat_mul(&dj, &jac);
    }
    (q, jac)
}

/// Time-freezing count `n` and repetition counts `k_j` per interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingSchedule {
    pub n: usize,
    pub k: Vec<usize>,
}

impl SplittingSchedule {
    pub fn uniform(n: usize, k: usize) -> Result<Self, ShearError> {
        let s = SplittingSchedule { n, k: vec![k; n] };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ShearError> {
        if self.n == 0 {
            return Err(ShearError::InvalidSchedule("n must be at least 1".into()));
        }
        if self.k.len() != self.n || self.k.contains(&0) {
            return Err(ShearError::InvalidSchedule("need one k_j >= 1 per interval".into()));
        }
        Ok(())
    }
}

/// The schedule together with the shearing modes `W_r^(j)` of each interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseShearingIsotopy {
    pub schedule: SplittingSchedule,
    pub modes: Vec<Vec<ShearingStep>>,
}

impl PiecewiseShearingIsotopy {
    pub fn new(schedule: SplittingSchedule, modes: Vec<Vec<ShearingStep>>) -> Result<Self, ShearError> {
        schedule.validate()?;
        if modes.len() != schedule.n {
            return Err(ShearError::InvalidSchedule("one mode list per interval".into()));
        }
        Ok(PiecewiseShearingIsotopy { schedule, modes })
    }

    pub fn mode_counts(&self) -> Vec<usize> {
        self.modes.iter().map(Vec::len).collect()
    }

    pub fn eval(&self, t: f64, p: V2) -> (V2, M2) {
        omega_flow(self, t, p)
    }
}

/// `Xi^{t - i/n}_(i) o Xi^{1/n}_(i-1) o ... o Xi^{1/n}_(0)`.
pub fn omega_flow(iso: &PiecewiseShearingIsotopy, t: f64, p: V2) -> (V2, M2) {
    let n = iso.schedule.n;
    let i = interval(t, n);
    let mut q = p;
    let mut jac = ID;
    for j in 0..=i {
        let dt = if j < i { 1.0 / n as f64 } else { t - i as f64 / n as f64 };
        let (q2, dj) = xi_flow(&iso.modes[j], iso.schedule.k[j], n, dt, q);
        q = q2;
        jac = mat_mul(&dj, &jac);
    }
    (q, jac)
}
