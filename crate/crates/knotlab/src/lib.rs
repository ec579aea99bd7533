//! Pillowcase images of SU(2) character varieties of knot groups, surgery slope tests,
//! exact Alexander and A-polynomial tools, and black-graph determinant bounds.

pub mod alexander;
pub mod apoly;
pub mod braid;
pub mod diagram;
pub mod image_ops;
pub mod laurent;
pub mod pillowcase;
pub mod presentation;
pub mod rational;
pub mod slopes;
pub mod su2;
pub mod tracer;

pub use pillowcase::{PillowcaseImage, PillowcasePoint};
pub use presentation::KnotPresentation;
pub use su2::Su2;
