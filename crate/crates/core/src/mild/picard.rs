use serde::Serialize;

use super::bilinear::bilinear_b;
use super::trajectory::{heat_trajectory, Trajectory};
use crate::error::{Error, Result};
use crate::fields::{Spectral, VectorField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    pub horizon: f64,
    /// `None` selects `horizon / 128`.
    pub dt: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
}

impl PicardOptions {
    pub fn new(horizon: f64) -> Self {
        Self {
            horizon,
            dt: None,
            tol: 1e-10,
            max_iter: 50,
        }
    }

    pub fn step(&self) -> f64 {
        self.dt.unwrap_or(self.horizon / 128.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PicardReport {
    pub iterations: usize,
    pub converged: bool,
    /// `sup_t |u^{m+1} - u^m|` for each iteration.
    pub increments: Vec<f64>,
    /// Successive increment ratios.
    pub ratios: Vec<f64>,
    /// `sup_t |u - U - B(u, u)|` for the returned iterate.
    pub defect: f64,
    /// Largest `sup |div u^m|` over all iterates and snapshots.
    pub max_divergence: f64,
    /// `sup |B(U, U)| / (sqrt(T) sup |U|^2)`.
    pub bilinear_constant: f64,
    pub datum_sup: f64,
    pub horizon: f64,
    pub dt: f64,
    pub message: Option<String>,
}

fn max_divergence(sp: &Spectral, traj: &Trajectory) -> Result<f64> {
    let mut m: f64 = 0.0;
    for f in &traj.fields {
        m = m.max(sp.divergence(f)?.sup_norm());
    }
    Ok(m)
}

fn add(a: &Trajectory, b: &Trajectory) -> Trajectory {
    let mut out = a.clone();
    for (f, g) in out.fields.iter_mut().zip(&b.fields) {
        f.axpy(1.0, g);
    }
    out
}

/// Fixed-point iteration `u^{m+1} = U + B(u^m, u^m)` from `u^0 = U`.
///
/// Failure to contract is reported through `converged = false` and the
/// message, not as an error.
pub fn picard_solve(u0: &VectorField, opts: &PicardOptions) -> Result<(Trajectory, PicardReport)> {
    u0.validate()?;
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if opts.max_iter == 0 {
        return Err(Error::InvalidInput("max_iter must be at least 1".into()));
    }
    let datum_sup = u0.sup_norm();
    let heat = heat_trajectory(u0, opts.horizon, opts.step())?;
    let dt = heat.dt;
    let sp = Spectral::new(u0.grid);
    let mut current = heat.clone();
    let mut max_div = max_divergence(&sp, &current)?;
    let mut increments = Vec::new();
    let mut ratios = Vec::new();
    let mut converged = false;
    let mut bilinear_constant = 0.0;
    for m in 0..opts.max_iter {
        let b = bilinear_b(&current, &current)?;
        if m == 0 {
            let usup = heat.sup_norm();
            if usup > 0.0 {
                bilinear_constant = b.sup_norm() / (opts.horizon.sqrt() * usup * usup);
            }
        }
        let next = add(&heat, &b);
        let inc = next.sup_distance(&current)?;
        if let Some(&prev) = increments.last() {
            let prev: f64 = prev;
            ratios.push(if prev > 0.0 { inc / prev } else { 0.0 });
        }
        increments.push(inc);
        if !inc.is_finite() {
            break;
        }
        max_div = max_div.max(max_divergence(&sp, &next)?);
        current = next;
        if inc <= opts.tol {
            converged = true;
            break;
        }
        if inc > 1e6 * datum_sup.max(1.0) {
            break;
        }
    }
    let defect = {
        let b = bilinear_b(&current, &current)?;
        add(&heat, &b).sup_distance(&current)?
    };
    let message = if converged {
        None
    } else {
        let last = ratios.last().copied().unwrap_or(f64::NAN);
        Some(format!(
            "no contraction after {} iterations: last increment ratio {last:.6}, last increment {:.3e}",
            increments.len(),
            increments.last().copied().unwrap_or(f64::NAN)
        ))
    };
    let mut traj = current;
    traj.scheme = "picard".into();
    traj.tolerances.insert("picard_tol".into(), opts.tol);
    traj.tolerances.insert("defect".into(), defect);
    let report = PicardReport {
        iterations: increments.len(),
        converged,
        increments,
        ratios,
        defect,
        max_divergence: max_div,
        bilinear_constant,
        datum_sup,
        horizon: opts.horizon,
        dt,
        message,
    };
    Ok((traj, report))
}
