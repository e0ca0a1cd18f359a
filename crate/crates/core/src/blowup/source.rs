//! Space-time velocity sources that can be sampled at arbitrary points:
//! torus trajectories, sampled boxes and closures.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mild::Trajectory;

pub trait VelocitySource: Sync {
    fn dim(&self) -> usize;
    /// Closed time interval on which the source is defined.
    fn time_range(&self) -> (f64, f64);
    /// Spatial box, or `None` for periodic or unbounded sources.
    fn bounds(&self) -> Option<(Vec<f64>, Vec<f64>)>;
    fn velocity(&self, x: &[f64], t: f64) -> Vec<f64>;
}

/// Cubic Lagrange weights for nodes at offsets -1, 0, 1, 2.
fn lagrange4(f: f64) -> [f64; 4] {
    [
        -f * (f - 1.0) * (f - 2.0) / 6.0,
        (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0,
        -(f + 1.0) * f * (f - 2.0) / 2.0,
        (f + 1.0) * f * (f - 1.0) / 6.0,
    ]
}

/// Bracketing snapshot pair and the weight of the later one.
fn time_bracket(times: &[f64], t: f64) -> (usize, usize, f64) {
    let last = times.len() - 1;
    if last == 0 || t <= times[0] {
        return (0, 0, 0.0);
    }
    if t >= times[last] {
        return (last, last, 0.0);
    }
    let k = times.partition_point(|&s| s <= t) - 1;
    if times[k] == t {
        return (k, k, 0.0);
    }
    (k, k + 1, (t - times[k]) / (times[k + 1] - times[k]))
}

/// Tensor-product cubic interpolation. `stencil(axis, x)` returns the four
/// node indices along that axis and the weights.
fn tensor_interp(
    dim: usize,
    strides: &[usize],
    comps: &[&[f64]],
    x: &[f64],
    stencil: impl Fn(usize, f64) -> ([usize; 4], [f64; 4]),
) -> Vec<f64> {
    let st: Vec<([usize; 4], [f64; 4])> = (0..dim).map(|a| stencil(a, x[a])).collect();
    let mut out = vec![0.0; comps.len()];
    let total = 4usize.pow(dim as u32);
    for combo in 0..total {
        let mut w = 1.0;
        let mut idx = 0;
        let mut c = combo;
        for a in 0..dim {
            let p = c % 4;
            c /= 4;
            w *= st[a].1[p];
            idx += st[a].0[p] * strides[a];
        }
        for (o, comp) in out.iter_mut().zip(comps) {
            *o += w * comp[idx];
        }
    }
    out
}

fn strides(dim: usize, n: usize) -> Vec<usize> {
    (0..dim).map(|a| n.pow((dim - 1 - a) as u32)).collect()
}

impl VelocitySource for Trajectory {
    fn dim(&self) -> usize {
        self.grid().dim()
    }

    fn time_range(&self) -> (f64, f64) {
        (self.fields[0].time, self.fields[self.len() - 1].time)
    }

    fn bounds(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        None
    }

    /// Periodic cubic Lagrange in space, linear in time.
    fn velocity(&self, x: &[f64], t: f64) -> Vec<f64> {
        let g = self.grid();
        let (n, h) = (g.n(), g.spacing());
        let stencil = |_: usize, xa: f64| {
            let s = xa / h;
            let base = s.floor();
            let f = s - base;
            let b = base as i64;
            let idx = [-1i64, 0, 1, 2].map(|o| (b + o).rem_euclid(n as i64) as usize);
            (idx, lagrange4(f))
        };
        let times: Vec<f64> = self.fields.iter().map(|f| f.time).collect();
        let (k0, k1, w) = time_bracket(&times, t);
        let st = strides(g.dim(), n);
        let at = |k: usize| {
            let comps: Vec<&[f64]> = self.fields[k].components.iter().map(|c| c.as_slice()).collect();
            tensor_interp(g.dim(), &st, &comps, x, stencil)
        };
        let a = at(k0);
        if w == 0.0 {
            return a;
        }
        let b = at(k1);
        a.iter().zip(&b).map(|(p, q)| (1.0 - w) * p + w * q).collect()
    }
}

/// Samples on a cube of `nodes^dim` points (odd `nodes`) centered at
/// `center`, at increasing `times`. Node coordinates are
/// `center + (m - (nodes - 1)/2) * spacing`; the last axis varies fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxTrajectory {
    pub dim: usize,
    pub center: Vec<f64>,
    pub half_width: f64,
    pub nodes: usize,
    pub times: Vec<f64>,
    /// `values[time][component][node]`.
    pub values: Vec<Vec<Vec<f64>>>,
}

impl BoxTrajectory {
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.nodes - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.nodes.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes == 0
    }

    pub fn strides(&self) -> Vec<usize> {
        strides(self.dim, self.nodes)
    }

    pub fn multi_index(&self, idx: usize) -> Vec<usize> {
        let mut m = vec![0; self.dim];
        let mut r = idx;
        for a in (0..self.dim).rev() {
            m[a] = r % self.nodes;
            r /= self.nodes;
        }
        m
    }

    /// Offset of node `m` from the center along one axis.
    pub fn offset(&self, m: usize) -> f64 {
        (m as f64 - ((self.nodes - 1) / 2) as f64) * self.spacing()
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .iter()
            .zip(&self.center)
            .map(|(&m, c)| c + self.offset(m))
            .collect()
    }

    pub fn center_index(&self) -> usize {
        let c = (self.nodes - 1) / 2;
        self.strides().iter().map(|s| s * c).sum()
    }

    pub fn magnitude(&self, time: usize, idx: usize) -> f64 {
        self.values[time].iter().map(|c| c[idx] * c[idx]).sum::<f64>().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        (0..self.times.len())
            .flat_map(|t| (0..self.len()).map(move |i| (t, i)))
            .fold(0.0, |m, (t, i)| m.max(self.magnitude(t, i)))
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.dim) || self.center.len() != self.dim {
            return Err(Error::Dimension(format!("box dimension {} unsupported", self.dim)));
        }
        if self.nodes < 5 || self.nodes % 2 == 0 {
            return Err(Error::InvalidInput(format!("box needs an odd node count >= 5, got {}", self.nodes)));
        }
        if !(self.half_width > 0.0) {
            return Err(Error::InvalidInput("box half width must be positive".into()));
        }
        if self.times.is_empty() || self.values.len() != self.times.len() {
            return Err(Error::Shape("one value block per time is required".into()));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("box times must increase strictly".into()));
        }
        for block in &self.values {
            if block.len() != self.dim || block.iter().any(|c| c.len() != self.len()) {
                return Err(Error::Shape("value block does not match the box".into()));
            }
        }
        Ok(())
    }

    /// Sample `source` on this box's geometry at the given times.
    pub fn sample(
        source: &dyn VelocitySource,
        center: Vec<f64>,
        half_width: f64,
        nodes: usize,
        times: Vec<f64>,
    ) -> Result<Self> {
        let dim = source.dim();
        let mut b = Self {
            dim,
            center,
            half_width,
            nodes,
            values: vec![vec![Vec::new(); dim]; times.len()],
            times,
        };
        let pts: Vec<Vec<f64>> = (0..b.len()).map(|i| b.point(i)).collect();
        b.values = b
            .times
            .par_iter()
            .map(|&t| {
                let mut block = vec![vec![0.0; pts.len()]; dim];
                for (i, p) in pts.iter().enumerate() {
                    for (a, v) in source.velocity(p, t).into_iter().enumerate() {
                        block[a][i] = v;
                    }
                }
                block
            })
            .collect();
        b.validate()?;
        Ok(b)
    }
}

impl VelocitySource for BoxTrajectory {
    fn dim(&self) -> usize {
        self.dim
    }

    fn time_range(&self) -> (f64, f64) {
        (self.times[0], self.times[self.times.len() - 1])
    }

    fn bounds(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let lo = self.center.iter().map(|c| c - self.half_width).collect();
        let hi = self.center.iter().map(|c| c + self.half_width).collect();
        Some((lo, hi))
    }

    /// Cubic Lagrange with stencils shifted inward at the faces, linear in time.
    fn velocity(&self, x: &[f64], t: f64) -> Vec<f64> {
        let h = self.spacing();
        let mid = ((self.nodes - 1) / 2) as f64;
        let last = self.nodes as i64 - 3;
        let stencil = |a: usize, xa: f64| {
            let s = (xa - self.center[a]) / h + mid;
            let b = (s.floor() as i64).clamp(1, last);
            let f = s - b as f64;
            let idx = [-1i64, 0, 1, 2].map(|o| (b + o) as usize);
            (idx, lagrange4(f))
        };
        let (k0, k1, w) = time_bracket(&self.times, t);
        let st = self.strides();
        let at = |k: usize| {
            let comps: Vec<&[f64]> = self.values[k].iter().map(|c| c.as_slice()).collect();
            tensor_interp(self.dim, &st, &comps, x, stencil)
        };
        let a = at(k0);
        if w == 0.0 {
            return a;
        }
        let b = at(k1);
        a.iter().zip(&b).map(|(p, q)| (1.0 - w) * p + w * q).collect()
    }
}

type VelocityFn = dyn Fn(&[f64], f64) -> Vec<f64> + Send + Sync;

/// Analytic velocity on all of space over a time interval.
pub struct FnSource {
    pub dim: usize,
    pub times: (f64, f64),
    f: Box<VelocityFn>,
}

impl FnSource {
    pub fn new(dim: usize, times: (f64, f64), f: impl Fn(&[f64], f64) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Self {
            dim,
            times,
            f: Box::new(f),
        }
    }
}

impl std::fmt::Debug for FnSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnSource").field("dim", &self.dim).field("times", &self.times).finish()
    }
}

impl VelocitySource for FnSource {
    fn dim(&self) -> usize {
        self.dim
    }
    fn time_range(&self) -> (f64, f64) {
        self.times
    }
    fn bounds(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        None
    }
    fn velocity(&self, x: &[f64], t: f64) -> Vec<f64> {
        (self.f)(x, t)
    }
}

/// Swirl with `u_theta = r (2 - r^2)` inside the unit cylinder and `1/r`
/// outside, so that `r |u| = 1` for `r >= 1` and `< 1` inside.
pub fn capped_swirl(x: &[f64]) -> Vec<f64> {
    let r2 = x[0] * x[0] + x[1] * x[1];
    let s = if r2 < 1.0 { 2.0 - r2 } else { 1.0 / r2 };
    vec![-x[1] * s, x[0] * s, 0.0]
}
