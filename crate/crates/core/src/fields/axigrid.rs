use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform `(r, z)` rectangle whose first radial line is the symmetry axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisymGrid {
    r_max: f64,
    z_min: f64,
    z_max: f64,
    nr: usize,
    nz: usize,
}

impl AxisymGrid {
    pub fn new(r_max: f64, z_min: f64, z_max: f64, nr: usize, nz: usize) -> Result<Self> {
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::InvalidInput(format!("r_max must be positive, got {r_max}")));
        }
        if !(z_max > z_min) || !z_min.is_finite() || !z_max.is_finite() {
            return Err(Error::InvalidInput(format!("need z_max > z_min, got [{z_min}, {z_max}]")));
        }
        if nr < 8 || nz < 8 {
            return Err(Error::InvalidInput(format!("need nr, nz >= 8, got {nr} x {nz}")));
        }
        Ok(Self {
            r_max,
            z_min,
            z_max,
            nr,
            nz,
        })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }
    pub fn z_min(&self) -> f64 {
        self.z_min
    }
    pub fn z_max(&self) -> f64 {
        self.z_max
    }
    pub fn nr(&self) -> usize {
        self.nr
    }
    pub fn nz(&self) -> usize {
        self.nz
    }
    pub fn dr(&self) -> f64 {
        self.r_max / (self.nr - 1) as f64
    }
    pub fn dz(&self) -> f64 {
        (self.z_max - self.z_min) / (self.nz - 1) as f64
    }
    pub fn len(&self) -> usize {
        self.nr * self.nz
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn r(&self, i: usize) -> f64 {
        i as f64 * self.dr()
    }
    pub fn z(&self, j: usize) -> f64 {
        self.z_min + j as f64 * self.dz()
    }
    /// Flat index; `r` varies fastest.
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nr + i
    }
    /// Outer boundary: `r = r_max` or either end in `z`. The axis is not part of it.
    pub fn is_outer_boundary(&self, i: usize, j: usize) -> bool {
        i == self.nr - 1 || j == 0 || j == self.nz - 1
    }
    /// Distance in nodes to the outer boundary.
    pub fn rings_from_outer(&self, i: usize, j: usize) -> usize {
        (self.nr - 1 - i).min(j).min(self.nz - 1 - j)
    }
}

/// Parity of a scalar under reflection across the axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisymScalar {
    pub grid: AxisymGrid,
    pub samples: Vec<f64>,
    pub parity: Parity,
    pub time: f64,
}

impl AxisymScalar {
    pub fn zeros(grid: AxisymGrid, parity: Parity, time: f64) -> Self {
        Self {
            grid,
            samples: vec![0.0; grid.len()],
            parity,
            time,
        }
    }

    pub fn from_fn(grid: AxisymGrid, parity: Parity, time: f64, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut samples = vec![0.0; grid.len()];
        for j in 0..grid.nz() {
            for i in 0..grid.nr() {
                samples[grid.idx(i, j)] = f(grid.r(i), grid.z(j));
            }
        }
        Self {
            grid,
            samples,
            parity,
            time,
        }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.samples[self.grid.idx(i, j)]
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(k) = self.samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite sample at node {k}")));
        }
        Ok(())
    }

    pub fn sup_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }
    pub fn max(&self) -> f64 {
        self.samples.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }
    pub fn min(&self) -> f64 {
        self.samples.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }
}

/// Cylindrical velocity components on an axisymmetric grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisymField {
    pub grid: AxisymGrid,
    pub u_r: Vec<f64>,
    pub u_theta: Vec<f64>,
    pub u_z: Vec<f64>,
    pub time: f64,
}

impl AxisymField {
    /// Sample a Cartesian field on the half-plane `theta = 0`.
    pub fn from_cartesian(grid: AxisymGrid, time: f64, f: impl Fn(&[f64; 3]) -> [f64; 3]) -> Self {
        let n = grid.len();
        let (mut u_r, mut u_theta, mut u_z) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for j in 0..grid.nz() {
            for i in 0..grid.nr() {
                let p = [grid.r(i), 0.0, grid.z(j)];
                let c = to_cylindrical(&p, &f(&p));
                let k = grid.idx(i, j);
                u_r[k] = c[0];
                u_theta[k] = c[1];
                u_z[k] = c[2];
            }
        }
        Self {
            grid,
            u_r,
            u_theta,
            u_z,
            time,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, c) in [("u_r", &self.u_r), ("u_theta", &self.u_theta), ("u_z", &self.u_z)] {
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("non-finite sample in {name}")));
            }
        }
        for j in 0..self.grid.nz() {
            let k = self.grid.idx(0, j);
            if self.u_r[k] != 0.0 || self.u_theta[k] != 0.0 {
                return Err(Error::Parity(format!(
                    "u_r and u_theta must vanish on the axis (row {j})"
                )));
            }
        }
        Ok(())
    }

    pub fn magnitude(&self, k: usize) -> f64 {
        (self.u_r[k].powi(2) + self.u_theta[k].powi(2) + self.u_z[k].powi(2)).sqrt()
    }
}

/// Cylindrical components `(u_r, u_theta, u_z)` of Cartesian `v` at point `x`.
/// On the axis the angular direction is undefined and `u_r = u_theta = 0`
/// is imposed.
pub fn to_cylindrical(x: &[f64; 3], v: &[f64; 3]) -> [f64; 3] {
    let r = x[0].hypot(x[1]);
    if r <= 1e-14 * (1.0 + x[2].abs()) {
        return [0.0, 0.0, v[2]];
    }
    let (c, s) = (x[0] / r, x[1] / r);
    [c * v[0] + s * v[1], -s * v[0] + c * v[1], v[2]]
}

/// Inverse of [`to_cylindrical`] off the axis.
pub fn from_cylindrical(x: &[f64; 3], u: &[f64; 3]) -> [f64; 3] {
    let r = x[0].hypot(x[1]);
    if r <= 1e-14 * (1.0 + x[2].abs()) {
        return [0.0, 0.0, u[2]];
    }
    let (c, s) = (x[0] / r, x[1] / r);
    [c * u[0] - s * u[1], s * u[0] + c * u[1], u[2]]
}
