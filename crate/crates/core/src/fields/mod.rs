//! Grid containers, spectral operators, norms, coordinate transforms and the
//! Helmholtz projection shared by the solvers.

pub mod axigrid;
pub mod green;
pub mod interp;
pub mod io;
pub mod spectral;
pub mod torus;

pub use axigrid::{from_cylindrical, to_cylindrical, AxisymField, AxisymGrid, AxisymScalar, Parity};
pub use green::{green_identity_check, GreenIdentity};
pub use interp::{refined_max, refined_min, refined_sup_abs, PointEvaluator};
pub use spectral::{curl2d, divergence, gradient, helmholtz_project, Spectral};
pub use torus::{taylor_green, ScalarField, TorusGrid, VectorField};
