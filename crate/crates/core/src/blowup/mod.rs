//! Blow-up diagnostics: sup-norm traces, the Leray lower rate, Type I/II
//! classification, parabolic rescaling and scale-invariant monitors.

mod monitors;
mod rescale;
mod source;
mod tail;
mod trace;

pub use monitors::{scale_invariant_monitors, trajectory_monitors, Monitor, ScaleInvariantReport};
pub use rescale::{
    gamma_schedule, locate_max, nse_residual, rescale, rescale_sequence, second_rescale, NseResidual, RescaleStep,
    RescaleWindow, Rescaled,
};
pub use source::{capped_swirl, BoxTrajectory, FnSource, VelocitySource};
pub use tail::tail_integral;
pub use trace::{
    classify, leray_rate, serrin_norm, trace_from, BlowupTrace, BlowupType, Classification, LerayRate, SerrinNorm,
    DEFAULT_WINDOW, LERAY_FLAG_RATIO, MIN_WINDOW, SLOPE_TOL,
};
