//! Finite-difference operators on the `(r, z)` grid.
//!
//! Both radial operators are written in flux form so that their implicit
//! matrices are M-matrices:
//!
//! * meridional `L = r d_r((1/r) d_r) + d_zz`, which is also
//!   `Delta - (2/r) d_r` acting on `f = r u_theta`;
//! * five-dimensional `Delta_5 = d_rr + (3/r) d_r + d_zz` on even functions,
//!   `(1/r^3) d_r(r^3 d_r)` with face weights `2 i^2 (i+1)^2 / (2i + 1)` that
//!   make it exact on `r^2`, and the regular limit `8 (s_1 - s_0)/dr^2` on the
//!   axis.

use crate::error::{Error, Result};
use crate::fields::{AxisymGrid, AxisymScalar, Parity};
use crate::linalg::{BandLu, BandMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialOperator {
    /// `r d_r((1/r) d_r) + d_zz`; Dirichlet on the axis.
    Meridional,
    /// `d_rr + (3/r) d_r + d_zz`; the axis is an unknown.
    FiveDim,
}

impl RadialOperator {
    /// First radial index that is an unknown.
    pub fn first_radial(self) -> usize {
        match self {
            RadialOperator::Meridional => 1,
            RadialOperator::FiveDim => 0,
        }
    }

    /// Radial coupling `(left, right)` at node `i`; the operator there is
    /// `left (s_{i-1} - s_i) + right (s_{i+1} - s_i)` plus the `z` part.
    pub fn radial_coeffs(self, i: usize, dr: f64) -> (f64, f64) {
        let h2 = dr * dr;
        match self {
            RadialOperator::Meridional => {
                let fi = i as f64;
                (fi / ((fi - 0.5) * h2), fi / ((fi + 0.5) * h2))
            }
            RadialOperator::FiveDim => {
                if i == 0 {
                    (0.0, 8.0 / h2)
                } else {
                    let fi = i as f64;
                    let w = |k: f64| 2.0 * k * k * (k + 1.0) * (k + 1.0) / (2.0 * k + 1.0);
                    (w(fi - 1.0) / (fi.powi(3) * h2), w(fi) / (fi.powi(3) * h2))
                }
            }
        }
    }
}

/// Apply the operator at every node that is not on the outer boundary (and
/// not on the axis for the meridional operator). Other entries are zero.
pub fn apply(op: RadialOperator, grid: &AxisymGrid, s: &[f64]) -> Vec<f64> {
    let (nr, nz) = (grid.nr(), grid.nz());
    let dz2 = grid.dz() * grid.dz();
    let mut out = vec![0.0; grid.len()];
    for j in 1..nz - 1 {
        for i in op.first_radial()..nr - 1 {
            let k = grid.idx(i, j);
            let (l, r) = op.radial_coeffs(i, grid.dr());
            let left = if i > 0 { s[k - 1] - s[k] } else { 0.0 };
            out[k] = l * left + r * (s[k + 1] - s[k]) + (s[k + nr] - 2.0 * s[k] + s[k - nr]) / dz2;
        }
    }
    out
}

/// Five-dimensional Laplacian of an even scalar. Outer-boundary entries are
/// zero.
pub fn laplacian5(s: &AxisymScalar) -> Result<AxisymScalar> {
    if s.parity != Parity::Even {
        return Err(Error::Parity("the five-dimensional Laplacian needs an even scalar".into()));
    }
    s.validate()?;
    Ok(AxisymScalar {
        grid: s.grid,
        samples: apply(RadialOperator::FiveDim, &s.grid, &s.samples),
        parity: Parity::Even,
        time: s.time,
    })
}

/// Unknown numbering for implicit solves: interior nodes from
/// `first_radial` to `nr - 2` in `r`, `1` to `nz - 2` in `z`.
#[derive(Debug, Clone, Copy)]
pub struct Unknowns {
    pub first: usize,
    pub per_row: usize,
    pub rows: usize,
}

impl Unknowns {
    pub fn new(op: RadialOperator, grid: &AxisymGrid) -> Self {
        let first = op.first_radial();
        Self {
            first,
            per_row: grid.nr() - 1 - first,
            rows: grid.nz() - 2,
        }
    }

    pub fn len(&self) -> usize {
        self.per_row * self.rows
    }

    pub fn node(&self, u: usize) -> (usize, usize) {
        (self.first + u % self.per_row, 1 + u / self.per_row)
    }

    pub fn index(&self, i: usize, j: usize) -> Option<usize> {
        if i < self.first || i >= self.first + self.per_row || j == 0 || j > self.rows {
            None
        } else {
            Some((j - 1) * self.per_row + (i - self.first))
        }
    }
}

/// Factorized `I - dt * op` on the unknowns, with the known neighbours
/// (axis for the meridional operator, outer boundary) moved to the right
/// side by [`ImplicitSolver::solve`].
#[derive(Debug, Clone)]
pub struct ImplicitSolver {
    op: RadialOperator,
    grid: AxisymGrid,
    dt: f64,
    unknowns: Unknowns,
    lu: BandLu,
}

impl ImplicitSolver {
    pub fn new(op: RadialOperator, grid: AxisymGrid, dt: f64) -> Result<Self> {
        let unknowns = Unknowns::new(op, &grid);
        let band = unknowns.per_row;
        let mut m = BandMatrix::new(unknowns.len(), band, band);
        let cz = dt / (grid.dz() * grid.dz());
        for u in 0..unknowns.len() {
            let (i, j) = unknowns.node(u);
            let (l, r) = op.radial_coeffs(i, grid.dr());
            m.add(u, u, 1.0 + dt * (l + r) + 2.0 * cz);
            let mut couple = |ii: usize, jj: usize, c: f64| {
                if let Some(v) = unknowns.index(ii, jj) {
                    m.add(u, v, -c);
                }
            };
            if i > 0 {
                couple(i - 1, j, dt * l);
            }
            couple(i + 1, j, dt * r);
            couple(i, j - 1, cz);
            couple(i, j + 1, cz);
        }
        Ok(Self {
            op,
            grid,
            dt,
            unknowns,
            lu: m.factor()?,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Solve `(I - dt op) s_new = rhs` on the unknowns. Non-unknown nodes of
    /// `known` supply the Dirichlet values; the result keeps them.
    pub fn solve(&self, rhs: &[f64], known: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let nr = g.nr();
        let cz = self.dt / (g.dz() * g.dz());
        let mut b = vec![0.0; self.unknowns.len()];
        for (u, bu) in b.iter_mut().enumerate() {
            let (i, j) = self.unknowns.node(u);
            let k = g.idx(i, j);
            let (l, r) = self.op.radial_coeffs(i, g.dr());
            let mut v = rhs[k];
            if i > 0 && self.unknowns.index(i - 1, j).is_none() {
                v += self.dt * l * known[k - 1];
            }
            if self.unknowns.index(i + 1, j).is_none() {
                v += self.dt * r * known[k + 1];
            }
            if self.unknowns.index(i, j - 1).is_none() {
                v += cz * known[k - nr];
            }
            if self.unknowns.index(i, j + 1).is_none() {
                v += cz * known[k + nr];
            }
            *bu = v;
        }
        self.lu.solve(&mut b);
        let mut out = known.to_vec();
        for (u, v) in b.iter().enumerate() {
            let (i, j) = self.unknowns.node(u);
            out[g.idx(i, j)] = *v;
        }
        out
    }
}
