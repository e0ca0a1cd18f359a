//! Mild-solution machinery on the torus: heat extension, the bilinear
//! Duhamel form, Picard iteration, smoothing and vorticity diagnostics and the
//! decomposition of a weak solution into forced, caloric and drift parts.

mod bilinear;
pub mod datum;
mod decompose;
mod diagnostics;
mod picard;
mod trajectory;

pub use bilinear::{bilinear_b, duhamel_weights, Nonlinearity};
pub use decompose::{decompose, Decomposition, DEFAULT_HEAT_TOLERANCE};
pub use diagnostics::{smoothing_diagnostic, vorticity_residual, VorticityResidual};
pub use picard::{picard_solve, PicardOptions, PicardReport};
pub use trajectory::{heat_extend, heat_trajectory, Trajectory};
