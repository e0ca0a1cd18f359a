use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::VectorField;
use crate::mild::Trajectory;

use super::source::{BoxTrajectory, VelocitySource};
use super::trace::BlowupTrace;

/// Slack `gamma_k = 1 + 2^{-k}`.
pub fn gamma_schedule(k: u32) -> f64 {
    1.0 + 0.5f64.powi(k as i32)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaleStep {
    pub x_k: Vec<f64>,
    pub t_k: f64,
    pub m_k: f64,
    pub gamma_k: f64,
    /// When set, the zoom factor is `1 / lambda_k` instead of `m_k`.
    pub lambda_k: Option<f64>,
}

impl RescaleStep {
    /// Step with `m_k = |u(x_k, t_k)|` read from the source itself.
    pub fn normalized(source: &dyn VelocitySource, x_k: Vec<f64>, t_k: f64, gamma_k: f64) -> Result<Self> {
        let m_k = norm(&source.velocity(&x_k, t_k));
        let s = Self {
            x_k,
            t_k,
            m_k,
            gamma_k,
            lambda_k: None,
        };
        s.validate(source.dim())?;
        Ok(s)
    }

    pub fn scale(&self) -> f64 {
        self.lambda_k.map_or(self.m_k, |l| 1.0 / l)
    }

    /// Blow-up time seen in the rescaled frame.
    pub fn rescaled_time(&self, t: f64) -> f64 {
        (t - self.t_k) * self.scale().powi(2)
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if self.x_k.len() != dim {
            return Err(Error::Dimension(format!("x_k has {} entries, source is {dim}-dimensional", self.x_k.len())));
        }
        if !(self.m_k > 0.0 && self.m_k.is_finite()) {
            return Err(Error::InvalidInput(format!("M_k must be positive, got {}", self.m_k)));
        }
        if !(self.gamma_k >= 1.0) {
            return Err(Error::InvalidInput(format!("gamma_k must be at least 1, got {}", self.gamma_k)));
        }
        if let Some(l) = self.lambda_k {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidInput(format!("lambda_k must be positive, got {l}")));
            }
        }
        Ok(())
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Rescaled space-time window `|y_i| <= half_width`, `s in [-depth, 0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaleWindow {
    pub half_width: f64,
    pub depth: f64,
    /// Odd, so that `y = 0` is a node.
    pub nodes: usize,
    /// Includes both `s = -depth` and `s = 0`.
    pub time_samples: usize,
}

impl RescaleWindow {
    pub fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::InvalidInput("window half width must be positive".into()));
        }
        if !(self.depth >= 0.0 && self.depth.is_finite()) {
            return Err(Error::InvalidInput("window depth must be non-negative".into()));
        }
        if self.nodes < 5 || self.nodes % 2 == 0 {
            return Err(Error::InvalidInput(format!("window needs an odd node count >= 5, got {}", self.nodes)));
        }
        if self.time_samples == 0 || (self.depth > 0.0) != (self.time_samples > 1) {
            return Err(Error::InvalidInput("use one time sample for zero depth, several otherwise".into()));
        }
        Ok(())
    }

    /// The same window in the unscaled variables of a zoom by `m`.
    pub fn physical(&self, m: f64) -> Self {
        Self {
            half_width: self.half_width / m,
            depth: self.depth / (m * m),
            ..*self
        }
    }

    pub fn times(&self) -> Vec<f64> {
        if self.time_samples == 1 {
            return vec![0.0];
        }
        let last = (self.time_samples - 1) as f64;
        (0..self.time_samples)
            .map(|i| -self.depth * (1.0 - i as f64 / last))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rescaled {
    pub traj: BoxTrajectory,
    pub step: RescaleStep,
    /// `|v(0, 0)|`.
    pub origin_magnitude: f64,
    pub sup: f64,
    pub within_gamma: bool,
}

/// Smallest zoom factor whose window stays inside the source.
fn admissible_min(source: &dyn VelocitySource, step: &RescaleStep, w: &RescaleWindow) -> Result<f64> {
    let (t0, t1) = source.time_range();
    let slack = 1e-12 * (1.0 + step.t_k.abs());
    if step.t_k > t1 + slack || step.t_k < t0 - slack {
        return Err(Error::Geometry(format!(
            "t_k = {} lies outside the source times [{t0}, {t1}]; no M_k is admissible",
            step.t_k
        )));
    }
    let mut m_min: f64 = 0.0;
    if w.depth > 0.0 {
        let room = step.t_k - t0;
        m_min = if room > 0.0 { (w.depth / room).sqrt() } else { f64::INFINITY };
    }
    if let Some((lo, hi)) = source.bounds() {
        let dist = step
            .x_k
            .iter()
            .zip(lo.iter().zip(&hi))
            .map(|(x, (l, h))| (x - l).min(h - x))
            .fold(f64::INFINITY, f64::min);
        m_min = m_min.max(if dist > 0.0 { w.half_width / dist } else { f64::INFINITY });
    }
    Ok(m_min)
}

/// `v(y, s) = u(x_k + y/M, t_k + s/M^2) / M` on the window.
pub fn rescale(source: &dyn VelocitySource, step: &RescaleStep, window: &RescaleWindow) -> Result<Rescaled> {
    step.validate(source.dim())?;
    window.validate()?;
    let m = step.scale();
    let m_min = admissible_min(source, step, window)?;
    if m < m_min * (1.0 - 1e-12) {
        return Err(Error::Geometry(format!(
            "window escapes the source domain at M_k = {m}; admissible M_k range is [{m_min}, inf)"
        )));
    }
    let mapped = Mapped { source, step, m };
    let traj = BoxTrajectory::sample(&mapped, vec![0.0; source.dim()], window.half_width, window.nodes, window.times())?;
    let last = traj.times.len() - 1;
    let origin_magnitude = traj.magnitude(last, traj.center_index());
    let sup = traj.sup_norm();
    Ok(Rescaled {
        within_gamma: sup <= step.gamma_k * (1.0 + 1e-12),
        traj,
        step: step.clone(),
        origin_magnitude,
        sup,
    })
}

struct Mapped<'a> {
    source: &'a dyn VelocitySource,
    step: &'a RescaleStep,
    m: f64,
}

impl VelocitySource for Mapped<'_> {
    fn dim(&self) -> usize {
        self.source.dim()
    }
    fn time_range(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, 0.0)
    }
    fn bounds(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        None
    }
    fn velocity(&self, y: &[f64], s: f64) -> Vec<f64> {
        let x: Vec<f64> = self.step.x_k.iter().zip(y).map(|(x, y)| x + y / self.m).collect();
        let t = self.step.t_k + s / (self.m * self.m);
        self.source.velocity(&x, t).into_iter().map(|v| v / self.m).collect()
    }
}

/// `w(x, tau) = v(e_1 + x/M, s_k + tau/M^2) / M`.
pub fn second_rescale(v: &BoxTrajectory, m_k: f64, s_k: f64, window: &RescaleWindow) -> Result<Rescaled> {
    let mut e1 = vec![0.0; v.dim];
    e1[0] = 1.0;
    let step = RescaleStep {
        x_k: e1,
        t_k: s_k,
        m_k,
        gamma_k: 2.0,
        lambda_k: None,
    };
    rescale(v, &step, window)
}

/// Argmax node of `|u|` refined by one quadratic fit per axis of `|u|^2`.
pub fn locate_max(field: &VectorField) -> (Vec<f64>, f64) {
    let g = field.grid;
    let (k, peak) = field.argmax_magnitude();
    let (n, h, period) = (g.n() as i64, g.spacing(), g.period());
    let m = g.multi_index(k);
    let mag2 = |mm: [usize; 3]| field.magnitude_at(g.flat_index(mm)).powi(2);
    let mut x = Vec::with_capacity(g.dim());
    for a in 0..g.dim() {
        let shifted = |o: i64| {
            let mut mm = m;
            mm[a] = (m[a] as i64 + o).rem_euclid(n) as usize;
            mag2(mm)
        };
        let (fm, f0, fp) = (shifted(-1), shifted(0), shifted(1));
        let curv = fm - 2.0 * f0 + fp;
        let delta = if curv < 0.0 { (0.5 * (fm - fp) / curv).clamp(-0.5, 0.5) } else { 0.0 };
        x.push(((m[a] as f64 + delta) * h).rem_euclid(period));
    }
    (x, peak)
}

/// For `k = 1..=count`: the latest snapshot with `h(t) >= H(t) / gamma_k`,
/// its refined sup location and `M_k = |u(x_k, t_k)|`.
pub fn rescale_sequence(traj: &Trajectory, trace: &BlowupTrace, count: u32) -> Result<Vec<RescaleStep>> {
    if trace.len() != traj.len() {
        return Err(Error::Shape("trace and trajectory lengths differ".into()));
    }
    (1..=count)
        .map(|k| {
            let gamma = gamma_schedule(k);
            let idx = (0..trace.len())
                .rev()
                .find(|&i| trace.h[i] * gamma >= trace.running_max[i])
                .ok_or_else(|| Error::Data(format!("no snapshot reaches H / gamma_{k}")))?;
            let (x_k, _) = locate_max(&traj.fields[idx]);
            RescaleStep::normalized(traj, x_k, traj.fields[idx].time, gamma)
        })
        .collect()
}

/// Vorticity-form residual of the Navier-Stokes equations on a sampled box:
/// `w_t + u.grad w - w.grad u - Delta w` (no stretching term in 2D),
/// second-order centered differences at nodes two or more away from the
/// faces and at interior times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NseResidual {
    pub absolute: f64,
    /// Largest `|w_t| + |u.grad w| + |w.grad u| + |Delta w|`.
    pub scale: f64,
    pub relative: f64,
}

pub fn nse_residual(b: &BoxTrajectory) -> Result<NseResidual> {
    b.validate()?;
    let nt = b.times.len();
    if nt < 3 {
        return Err(Error::Data("need at least three time samples".into()));
    }
    let (n, h, dim) = (b.nodes, b.spacing(), b.dim);
    let st = b.strides();
    let inner = |m: &[usize], depth: usize| m.iter().all(|&v| v >= depth && v + depth < n);
    let d = |f: &[f64], k: usize, a: usize| (f[k + st[a]] - f[k - st[a]]) / (2.0 * h);
    // vorticity components per time
    let vort: Vec<Vec<Vec<f64>>> = b
        .values
        .iter()
        .map(|u| {
            let comps = if dim == 2 { 1 } else { 3 };
            let mut w = vec![vec![0.0; b.len()]; comps];
            for k in 0..b.len() {
                if !inner(&b.multi_index(k), 1) {
                    continue;
                }
                if dim == 2 {
                    w[0][k] = d(&u[1], k, 0) - d(&u[0], k, 1);
                } else {
                    w[0][k] = d(&u[2], k, 1) - d(&u[1], k, 2);
                    w[1][k] = d(&u[0], k, 2) - d(&u[2], k, 0);
                    w[2][k] = d(&u[1], k, 0) - d(&u[0], k, 1);
                }
            }
            w
        })
        .collect();
    let (mut absolute, mut scale): (f64, f64) = (0.0, 0.0);
    for ti in 1..nt - 1 {
        let u = &b.values[ti];
        let w = &vort[ti];
        let dt = b.times[ti + 1] - b.times[ti - 1];
        for k in 0..b.len() {
            if !inner(&b.multi_index(k), 2) {
                continue;
            }
            for c in 0..w.len() {
                let wt = (vort[ti + 1][c][k] - vort[ti - 1][c][k]) / dt;
                let adv: f64 = (0..dim).map(|a| u[a][k] * d(&w[c], k, a)).sum();
                let stretch: f64 = if dim == 3 { (0..3).map(|a| w[a][k] * d(&u[c], k, a)).sum() } else { 0.0 };
                let lap: f64 = (0..dim)
                    .map(|a| (w[c][k + st[a]] - 2.0 * w[c][k] + w[c][k - st[a]]) / (h * h))
                    .sum();
                absolute = absolute.max((wt + adv - stretch - lap).abs());
                scale = scale.max(wt.abs() + adv.abs() + stretch.abs() + lap.abs());
            }
        }
    }
    Ok(NseResidual {
        absolute,
        scale,
        relative: if scale > 0.0 { absolute / scale } else { 0.0 },
    })
}
