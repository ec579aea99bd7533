//! Approximation of area-preserving isotopies of the torus `R^2 / (2 pi Z)^2` by
//! piecewise shearing isotopies, with measured `C^0` / `C^1` errors checked against
//! explicit Gronwall-type bounds.

pub mod bounds;
pub mod certify;
pub mod field;
pub mod flow;
pub mod fourier;
pub mod linalg;
pub mod metrics;
pub mod shear;

use thiserror::Error;

pub use field::{FrozenField, HamiltonianField, HamiltonianMode, ShearSumField, VectorField};
pub use flow::{PiecewiseShearingIsotopy, SplittingSchedule};
pub use linalg::{M2, V2};
pub use shear::{FourierShearField, ShearingStep, TrigProfile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShearError {
    #[error("field is not divergence-free (max |div| = {0:e})")]
    NotDivergenceFree(f64),
    #[error("field has even (cosine) content {0:e}; not equivariant")]
    NotEquivariant(f64),
    #[error("v = {v:?} and w = {w:?} are not orthogonal")]
    NotOrthogonal { v: [i64; 2], w: [i64; 2] },
    #[error("reference integrator failed to reach tolerance after {steps} steps")]
    StepSizeUnderflow { steps: usize },
    #[error("negative argument {name} = {value}")]
    NegativeArgument { name: &'static str, value: f64 },
    #[error("grid size {0} below the minimum 64")]
    GridTooSmall(usize),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("FFT grid exponent {0} below 7")]
    FftTooCoarse(u32),
    #[error("{stage} C^{order} bound violated at t = {t}: measured {measured:e} > bound {bound:e}")]
    BoundViolated { stage: String, order: u8, t: f64, measured: f64, bound: f64 },
}
