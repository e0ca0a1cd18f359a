//! Numerical laboratory for bounded solutions of the incompressible
//! Navier-Stokes equations: Oseen kernels, mild solutions by Picard
//! iteration, maximum-principle diagnostics and blow-up rescaling.

pub mod axisym;
pub mod blowup;
pub mod config;
pub mod error;
pub mod kernels;
pub mod fields;
pub mod linalg;
pub mod mild;
pub mod parabolic;
pub mod quad;
pub mod run;
pub mod verify;

pub use error::{Error, Result};
