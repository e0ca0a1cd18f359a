//! Initial data for axisymmetric runs. Outer-boundary values are zero except
//! for rigid rotation, whose boundary carries `f = r^2`.

use crate::error::{Error, Result};
use crate::fields::{AxisymGrid, AxisymScalar, Parity};

use super::state::SwirlState;

fn zero_boundary(s: &mut AxisymScalar) {
    let g = s.grid;
    for j in 0..g.nz() {
        for i in 0..g.nr() {
            if g.is_outer_boundary(i, j) {
                s.samples[g.idx(i, j)] = 0.0;
            }
        }
    }
}

fn check_width(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidInput(format!("bump width must be positive, got {sigma}")));
    }
    Ok(())
}

/// `f = A r^2 exp(-(r^2 + (z - z_c)^2) / sigma^2)` with no azimuthal vorticity.
pub fn swirl_bump(grid: AxisymGrid, amplitude: f64, sigma: f64, z_center: f64) -> Result<SwirlState> {
    check_width(sigma)?;
    let mut f = AxisymScalar::from_fn(grid, Parity::Even, 0.0, |r, z| {
        amplitude * r * r * (-(r * r + (z - z_center).powi(2)) / (sigma * sigma)).exp()
    });
    zero_boundary(&mut f);
    SwirlState::new(f, AxisymScalar::zeros(grid, Parity::Even, 0.0), 0.0)
}

/// Gaussian `eta` and no swirl.
pub fn no_swirl_bump(grid: AxisymGrid, amplitude: f64, sigma: f64, z_center: f64) -> Result<SwirlState> {
    check_width(sigma)?;
    let mut eta = AxisymScalar::from_fn(grid, Parity::Even, 0.0, |r, z| {
        amplitude * (-(r * r + (z - z_center).powi(2)) / (sigma * sigma)).exp()
    });
    zero_boundary(&mut eta);
    SwirlState::new(AxisymScalar::zeros(grid, Parity::Even, 0.0), eta, 0.0)
}

/// Swirl bump plus a Gaussian `eta`, so both equations are active.
pub fn coupled_bump(grid: AxisymGrid, swirl: f64, vorticity: f64, sigma: f64) -> Result<SwirlState> {
    let a = swirl_bump(grid, swirl, sigma, 0.0)?;
    let b = no_swirl_bump(grid, vorticity, sigma, 0.25 * sigma)?;
    SwirlState::new(a.f, b.eta, 0.0)
}

/// `u_theta = r`: `f = r^2`, `eta = 0`.
pub fn rigid_rotation(grid: AxisymGrid) -> Result<SwirlState> {
    let f = AxisymScalar::from_fn(grid, Parity::Even, 0.0, |r, _| r * r);
    SwirlState::new(f, AxisymScalar::zeros(grid, Parity::Even, 0.0), 0.0)
}
