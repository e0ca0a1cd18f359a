//! Drift-diffusion `u_t + a . grad u - Delta u = 0` on 1D and 2D boxes with
//! Dirichlet data: implicit diffusion, explicit upwind drift, maximum
//! principle monitoring and an empirical probe of interior positivity.

mod harnack;
mod report;
mod solver;

pub use harnack::{harnack_stability_probe, worker_count, MemberResult, EpsilonRow, HarnackProbe, HarnackTable, ProbeFamily, ProbeOptions, Region};
pub use report::{max_principle_report, MaxPrincipleReport, Violation};
pub use solver::{parabolic_solve, BoxGrid, ParabolicProblem, ScalarTrajectory};
