use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on the torus `[0, L)^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    dim: usize,
    n: usize,
    period: f64,
}

impl TorusGrid {
    pub fn new(dim: usize, n: usize, period: f64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::Dimension(format!("torus dimension must be 2 or 3, got {dim}")));
        }
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "modes per axis must be even and >= 4, got {n}"
            )));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidInput(format!("period must be positive, got {period}")));
        }
        Ok(Self { dim, n, period })
    }

    /// `[0, 2pi)^2` with `n` nodes per axis.
    pub fn square(n: usize) -> Result<Self> {
        Self::new(2, n, 2.0 * PI)
    }

    /// `[0, 2pi)^3` with `n` nodes per axis.
    pub fn cube(n: usize) -> Result<Self> {
        Self::new(3, n, 2.0 * PI)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node multi-index for a flat index; axis 0 varies slowest.
    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        match self.dim {
            2 => [idx / n, idx % n, 0],
            _ => [idx / (n * n), (idx / n) % n, idx % n],
        }
    }

    pub fn flat_index(&self, m: [usize; 3]) -> usize {
        let n = self.n;
        match self.dim {
            2 => m[0] * n + m[1],
            _ => (m[0] * n + m[1]) * n + m[2],
        }
    }

    /// Coordinates of a node; unused trailing entries are zero.
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let m = self.multi_index(idx);
        let h = self.spacing();
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = m[a] as f64 * h;
        }
        x
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: TorusGrid,
    pub samples: Vec<f64>,
    pub time: f64,
}

impl ScalarField {
    pub fn new(grid: TorusGrid, samples: Vec<f64>, time: f64) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Shape(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        let f = Self {
            grid,
            samples,
            time,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn zeros(grid: TorusGrid, time: f64) -> Self {
        Self {
            grid,
            samples: vec![0.0; grid.len()],
            time,
        }
    }

    pub fn from_fn(grid: TorusGrid, time: f64, f: impl Fn(&[f64; 3]) -> f64) -> Self {
        let samples = (0..grid.len()).map(|i| f(&grid.coords(i))).collect();
        Self {
            grid,
            samples,
            time,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(i) = self.samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite sample at node {i}")));
        }
        Ok(())
    }

    /// Largest absolute sample, reduced in node order.
    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    /// Discrete L^p norm with the cell volume as weight.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp(self.grid, self.samples.iter().map(|v| v.abs()), p)
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: TorusGrid,
    pub components: Vec<Vec<f64>>,
    pub time: f64,
}

impl VectorField {
    pub fn new(grid: TorusGrid, components: Vec<Vec<f64>>, time: f64) -> Result<Self> {
        if components.len() != grid.dim() {
            return Err(Error::Shape(format!(
                "expected {} components, got {}",
                grid.dim(),
                components.len()
            )));
        }
        if let Some(c) = components.iter().find(|c| c.len() != grid.len()) {
            return Err(Error::Shape(format!(
                "component has {} samples, grid has {}",
                c.len(),
                grid.len()
            )));
        }
        let v = Self {
            grid,
            components,
            time,
        };
        v.validate()?;
        Ok(v)
    }

    pub fn zeros(grid: TorusGrid, time: f64) -> Self {
        Self {
            grid,
            components: vec![vec![0.0; grid.len()]; grid.dim()],
            time,
        }
    }

    /// Sample `f` at every node; only the first `dim` entries of the returned
    /// array are used.
    pub fn from_fn(grid: TorusGrid, time: f64, f: impl Fn(&[f64; 3]) -> [f64; 3]) -> Self {
        let mut components = vec![vec![0.0; grid.len()]; grid.dim()];
        for i in 0..grid.len() {
            let v = f(&grid.coords(i));
            for (a, c) in components.iter_mut().enumerate() {
                c[i] = v[a];
            }
        }
        Self {
            grid,
            components,
            time,
        }
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn validate(&self) -> Result<()> {
        for (a, c) in self.components.iter().enumerate() {
            if let Some(i) = c.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "non-finite sample in component {a} at node {i}"
                )));
            }
        }
        Ok(())
    }

    pub fn magnitude_at(&self, i: usize) -> f64 {
        self.components.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        (0..self.grid.len()).map(|i| self.magnitude_at(i)).collect()
    }

    /// Sup over nodes of the pointwise Euclidean magnitude.
    pub fn sup_norm(&self) -> f64 {
        (0..self.grid.len()).fold(0.0, |m: f64, i| m.max(self.magnitude_at(i)))
    }

    pub fn argmax_magnitude(&self) -> (usize, f64) {
        let mut best = (0, -1.0);
        for i in 0..self.grid.len() {
            let m = self.magnitude_at(i);
            if m > best.1 {
                best = (i, m);
            }
        }
        best
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        lp(self.grid, (0..self.grid.len()).map(|i| self.magnitude_at(i)), p)
    }

    /// Sup over nodes of `|self - other|`.
    pub fn sup_distance(&self, other: &VectorField) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.grid.len() {
            let d2: f64 = self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| (a[i] - b[i]).powi(2))
                .sum();
            m = m.max(d2.sqrt());
        }
        m
    }

    pub fn component_means(&self) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| c.iter().sum::<f64>() / c.len() as f64)
            .collect()
    }

    pub fn scaled(&self, s: f64) -> VectorField {
        VectorField {
            grid: self.grid,
            components: self
                .components
                .iter()
                .map(|c| c.iter().map(|v| v * s).collect())
                .collect(),
            time: self.time,
        }
    }

    pub fn axpy(&mut self, a: f64, other: &VectorField) {
        for (c, o) in self.components.iter_mut().zip(&other.components) {
            for (x, y) in c.iter_mut().zip(o) {
                *x += a * y;
            }
        }
    }
}

fn lp(grid: TorusGrid, values: impl Iterator<Item = f64>, p: f64) -> f64 {
    let cell = grid.spacing().powi(grid.dim() as i32);
    if p.is_infinite() {
        return values.fold(0.0, f64::max);
    }
    let s: f64 = values.map(|v| v.powf(p)).sum();
    (s * cell).powf(1.0 / p)
}

/// `(-cos x1 sin x2, sin x1 cos x2)` scaled by `amplitude`.
pub fn taylor_green(grid: TorusGrid, amplitude: f64, time: f64) -> Result<VectorField> {
    if grid.dim() != 2 {
        return Err(Error::Dimension("Taylor-Green field is two-dimensional".into()));
    }
    Ok(VectorField::from_fn(grid, time, |x| {
        [
            -amplitude * x[0].cos() * x[1].sin(),
            amplitude * x[0].sin() * x[1].cos(),
            0.0,
        ]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(TorusGrid::new(2, 6, 1.0).is_ok());
        assert!(TorusGrid::new(2, 5, 1.0).is_err());
        assert!(TorusGrid::new(2, 2, 1.0).is_err());
        assert!(TorusGrid::new(4, 8, 1.0).is_err());
        assert!(TorusGrid::new(2, 8, 0.0).is_err());
    }

    #[test]
    fn index_round_trip() {
        let g = TorusGrid::cube(8).unwrap();
        for i in [0, 7, 63, 64, 511] {
            assert_eq!(g.flat_index(g.multi_index(i)), i);
        }
    }

    #[test]
    fn taylor_green_sup_is_one() {
        let g = TorusGrid::square(64).unwrap();
        let tg = taylor_green(g, 1.0, 0.0).unwrap();
        let n = g.n() as f64;
        assert!((tg.sup_norm() - 1.0).abs() <= 1.0 / (n * n));
        assert_eq!(VectorField::zeros(g, 0.0).sup_norm(), 0.0);
    }

    #[test]
    fn non_finite_samples_rejected() {
        let g = TorusGrid::square(4).unwrap();
        let mut s = vec![0.0; 16];
        s[3] = f64::NAN;
        assert!(ScalarField::new(g, s, 0.0).is_err());
    }

    #[test]
    fn lp_norm_of_constant() {
        let g = TorusGrid::square(8).unwrap();
        let f = ScalarField::from_fn(g, 0.0, |_| 2.0);
        let area = (2.0 * PI).powi(2);
        assert!((f.lp_norm(2.0) - 2.0 * area.sqrt()).abs() < 1e-12);
        assert_eq!(f.lp_norm(f64::INFINITY), 2.0);
    }
}
