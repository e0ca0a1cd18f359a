use crate::error::{Error, Result};
use crate::fields::{AxisymField, AxisymGrid, AxisymScalar, Parity};
use crate::linalg::{conjugate_gradient, CgStats};

use super::ops::{RadialOperator, Unknowns};

pub const STREAM_TOLERANCE: f64 = 1e-10;

/// Meridional velocity and the stream function it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Meridional {
    pub u_r: Vec<f64>,
    pub u_z: Vec<f64>,
    pub psi: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// `f = r u_theta`, `eta = omega_theta / r` and the Stokes stream function.
#[derive(Debug, Clone, PartialEq)]
pub struct SwirlState {
    pub grid: AxisymGrid,
    pub f: AxisymScalar,
    pub eta: AxisymScalar,
    pub psi: AxisymScalar,
    pub time: f64,
}

impl SwirlState {
    /// Build a state and solve for its stream function.
    pub fn new(f: AxisymScalar, eta: AxisymScalar, time: f64) -> Result<Self> {
        let grid = f.grid;
        if eta.grid != grid {
            return Err(Error::Shape("f and eta live on different grids".into()));
        }
        if eta.parity != Parity::Even || f.parity != Parity::Even {
            return Err(Error::Parity("f and eta must be tagged even".into()));
        }
        f.validate()?;
        eta.validate()?;
        for j in 0..grid.nz() {
            let v = f.at(0, j);
            if v != 0.0 {
                return Err(Error::Parity(format!("f must vanish on the axis, got {v:e} in row {j}")));
            }
        }
        let m = meridional_from_eta(&eta, None)?;
        Ok(Self::assemble(grid, f.samples, eta.samples, m.psi, time))
    }

    pub fn zeros(grid: AxisymGrid) -> Self {
        let z = vec![0.0; grid.len()];
        Self::assemble(grid, z.clone(), z.clone(), z, 0.0)
    }

    pub(crate) fn assemble(grid: AxisymGrid, f: Vec<f64>, eta: Vec<f64>, psi: Vec<f64>, time: f64) -> Self {
        let wrap = |samples| AxisymScalar {
            grid,
            samples,
            parity: Parity::Even,
            time,
        };
        Self {
            grid,
            f: wrap(f),
            eta: wrap(eta),
            psi: wrap(psi),
            time,
        }
    }

    pub fn velocity(&self) -> (Vec<f64>, Vec<f64>) {
        velocity_from_psi(&self.grid, &self.psi.samples)
    }

    /// Swirl velocity `f / r`, zero on the axis.
    pub fn u_theta(&self) -> Vec<f64> {
        let g = &self.grid;
        let mut out = vec![0.0; g.len()];
        for j in 0..g.nz() {
            for i in 1..g.nr() {
                let k = g.idx(i, j);
                out[k] = self.f.samples[k] / g.r(i);
            }
        }
        out
    }

    /// Azimuthal vorticity `r eta`.
    pub fn omega_theta(&self) -> Vec<f64> {
        let g = &self.grid;
        let mut out = self.eta.samples.clone();
        for j in 0..g.nz() {
            for i in 0..g.nr() {
                out[g.idx(i, j)] *= g.r(i);
            }
        }
        out
    }

    pub fn field(&self) -> AxisymField {
        let (u_r, u_z) = self.velocity();
        AxisymField {
            grid: self.grid,
            u_r,
            u_theta: self.u_theta(),
            u_z,
            time: self.time,
        }
    }
}

/// Solve `r d_r((1/r) psi_r) + psi_zz = -r^2 eta` with `psi = 0` on the axis
/// and outer boundary, then differentiate. `guess` warm-starts the iteration.
pub fn meridional_from_eta(eta: &AxisymScalar, guess: Option<&[f64]>) -> Result<Meridional> {
    if eta.parity != Parity::Even {
        return Err(Error::Parity("eta must be even across the axis".into()));
    }
    eta.validate()?;
    let g = eta.grid;
    let (psi, stats) = solve_stream(&g, &eta.samples, guess)?;
    let (u_r, u_z) = velocity_from_psi(&g, &psi);
    Ok(Meridional {
        u_r,
        u_z,
        psi,
        iterations: stats.iterations,
        residual: stats.residual,
    })
}

pub(crate) fn solve_stream(g: &AxisymGrid, eta: &[f64], guess: Option<&[f64]>) -> Result<(Vec<f64>, CgStats)> {
    let op = RadialOperator::Meridional;
    let unk = Unknowns::new(op, g);
    let (dr, dz2) = (g.dr(), g.dz() * g.dz());
    let n = unk.len();
    // -(1/r) L is symmetric on the unknowns
    let mut coeff = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(n);
    for u in 0..n {
        let (i, j) = unk.node(u);
        let r = g.r(i);
        let (cl, cr) = op.radial_coeffs(i, dr);
        let (cl, cr, cz) = (cl / r, cr / r, 1.0 / (r * dz2));
        coeff.push((cl, cr, cz));
        diag.push(cl + cr + 2.0 * cz);
        let k = g.idx(i, j);
        b.push(r * eta[k]);
        x.push(guess.map_or(0.0, |p| p[k]));
    }
    let apply = |p: &[f64], out: &mut [f64]| {
        for u in 0..n {
            let (i, j) = unk.node(u);
            let (cl, cr, cz) = coeff[u];
            let at = |ii: usize, jj: usize| unk.index(ii, jj).map_or(0.0, |v| p[v]);
            out[u] = diag[u] * p[u]
                - cl * at(i - 1, j)
                - cr * at(i + 1, j)
                - cz * (at(i, j - 1) + at(i, j + 1));
        }
    };
    let stats = conjugate_gradient(apply, &diag, &b, &mut x, STREAM_TOLERANCE, 20 * n + 100)?;
    let mut psi = vec![0.0; g.len()];
    for (u, v) in x.iter().enumerate() {
        let (i, j) = unk.node(u);
        psi[g.idx(i, j)] = *v;
    }
    Ok((psi, stats))
}

/// `u_r = -psi_z / r`, `u_z = psi_r / r` by centered differences, one-sided
/// on the outer boundary; on the axis `u_r = 0` and `u_z = 2 psi_1 / dr^2`.
pub fn velocity_from_psi(g: &AxisymGrid, psi: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (nr, nz, dr, dz) = (g.nr(), g.nz(), g.dr(), g.dz());
    let mut u_r = vec![0.0; g.len()];
    let mut u_z = vec![0.0; g.len()];
    for j in 0..nz {
        for i in 0..nr {
            let k = g.idx(i, j);
            if i == 0 {
                u_z[k] = 2.0 * psi[k + 1] / (dr * dr);
                continue;
            }
            let r = g.r(i);
            let psi_z = if j == 0 {
                (-3.0 * psi[k] + 4.0 * psi[k + nr] - psi[k + 2 * nr]) / (2.0 * dz)
            } else if j == nz - 1 {
                (3.0 * psi[k] - 4.0 * psi[k - nr] + psi[k - 2 * nr]) / (2.0 * dz)
            } else {
                (psi[k + nr] - psi[k - nr]) / (2.0 * dz)
            };
            let psi_r = if i == nr - 1 {
                (3.0 * psi[k] - 4.0 * psi[k - 1] + psi[k - 2]) / (2.0 * dr)
            } else {
                (psi[k + 1] - psi[k - 1]) / (2.0 * dr)
            };
            u_r[k] = -psi_z / r;
            u_z[k] = psi_r / r;
        }
    }
    (u_r, u_z)
}

/// Largest `|(1/r) d_r(r u_r) + d_z u_z|` over nodes off the axis and the
/// outer boundary, centered differences.
pub fn continuity_residual(g: &AxisymGrid, u_r: &[f64], u_z: &[f64]) -> f64 {
    let (nr, dr, dz) = (g.nr(), g.dr(), g.dz());
    let mut worst: f64 = 0.0;
    for j in 1..g.nz() - 1 {
        for i in 1..nr - 1 {
            let k = g.idx(i, j);
            let flux = (g.r(i + 1) * u_r[k + 1] - g.r(i - 1) * u_r[k - 1]) / (2.0 * dr);
            let div = flux / g.r(i) + (u_z[k + nr] - u_z[k - nr]) / (2.0 * dz);
            worst = worst.max(div.abs());
        }
    }
    worst
}
