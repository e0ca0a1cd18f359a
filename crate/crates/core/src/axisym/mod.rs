//! Axisymmetric flows in an `(r, z)` cylinder, evolved through the swirl
//! `f = r u_theta`, the reduced vorticity `eta = omega_theta / r` and the
//! Stokes stream function.

mod monitors;
mod ops;
pub mod scenarios;
mod state;
mod step;

pub use monitors::{
    fields_csv, liouville_monitors, primitive_residuals, sup_rho_u, LiouvilleReport, MonitorRow,
    PrimitiveResiduals, EXCLUDED_RINGS, MONOTONE_TOL,
};
pub use ops::{apply as apply_operator, laplacian5, ImplicitSolver, RadialOperator};
pub use state::{continuity_residual, meridional_from_eta, velocity_from_psi, Meridional, SwirlState, STREAM_TOLERANCE};
pub use step::{axisym_run, axisym_step, courant, eta_evolve, swirl_evolve, swirl_source, AxisymStepper};
