use rustfft::num_complex::Complex64;
use serde::Serialize;

use super::bilinear::StepWeights;
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::fields::spectral::Spectrum;
use crate::fields::{Spectral, VectorField};

/// Pointwise Frobenius norm of `grad^k u`, sup over nodes.
fn derivative_sup(sp: &Spectral, u: &VectorField, k: usize) -> f64 {
    let g = u.grid;
    let mut acc = vec![0.0; g.len()];
    match k {
        0 => {
            for (i, a) in acc.iter_mut().enumerate() {
                *a = u.magnitude_at(i).powi(2);
            }
        }
        1 => {
            for row in sp.velocity_gradient(u) {
                for d in row {
                    for (a, v) in acc.iter_mut().zip(d) {
                        *a += v * v;
                    }
                }
            }
        }
        _ => {
            for comp in sp.velocity_hessian(u) {
                for row in comp {
                    for d in row {
                        for (a, v) in acc.iter_mut().zip(d) {
                            *a += v * v;
                        }
                    }
                }
            }
        }
    }
    acc.iter().fold(0.0, |m: f64, v| m.max(v.sqrt()))
}

/// `sup_t t^{k/2 + l} |grad^k d_t^l u(t)|_inf / |u(0)|_inf`.
///
/// The time derivative is the central difference of neighbouring snapshots,
/// so `l = 1` uses interior snapshots only.
pub fn smoothing_diagnostic(traj: &Trajectory, k: usize, l: usize) -> Result<f64> {
    traj.validate()?;
    if k > 2 || l > 1 {
        return Err(Error::InvalidInput(format!("need k <= 2 and l <= 1, got k = {k}, l = {l}")));
    }
    if l == 1 && traj.len() < 3 {
        return Err(Error::Data(format!(
            "time derivative needs at least 3 snapshots, got {}",
            traj.len()
        )));
    }
    let u0 = traj.fields[0].sup_norm();
    if u0 == 0.0 {
        return Ok(0.0);
    }
    let t0 = traj.fields[0].time;
    let sp = Spectral::new(traj.grid());
    let power = k as f64 / 2.0 + l as f64;
    let mut best: f64 = 0.0;
    for n in 0..traj.len() {
        let t = traj.fields[n].time - t0;
        if t <= 0.0 {
            continue;
        }
        let field = if l == 0 {
            traj.fields[n].clone()
        } else {
            if n == 0 || n + 1 == traj.len() {
                continue;
            }
            let (a, b) = (&traj.fields[n - 1], &traj.fields[n + 1]);
            let mut d = b.clone();
            d.axpy(-1.0, a);
            d.scaled(1.0 / (b.time - a.time))
        };
        best = best.max(t.powf(power) * derivative_sup(&sp, &field, k));
    }
    Ok(best / u0)
}

#[derive(Debug, Clone, Serialize)]
pub struct VorticityResidual {
    /// Sup over steps of the semigroup-form one-step defect divided by `dt`.
    pub residual: f64,
    /// `residual / max(1, sup_t |omega|)`.
    pub relative: f64,
    /// Set when `relative` exceeds [`VorticityResidual::FLAG_THRESHOLD`].
    pub flagged: bool,
}

impl VorticityResidual {
    pub const FLAG_THRESHOLD: f64 = 1e-4;
}

fn vorticity_and_source(sp: &Spectral, u: &VectorField) -> Result<(Vec<Spectrum>, Vec<Spectrum>)> {
    let dim = u.dim();
    let zero = Complex64::new(0.0, 0.0);
    let uh = sp.forward_vector(u);
    let d = |c: usize, a: usize| sp.derivative(&uh[c], a);
    let sub = |x: Spectrum, y: Spectrum| -> Spectrum { x.iter().zip(&y).map(|(a, b)| a - b).collect() };
    let omega_h: Vec<Spectrum> = if dim == 2 {
        vec![sub(d(1, 0), d(0, 1))]
    } else {
        vec![sub(d(2, 1), d(1, 2)), sub(d(0, 2), d(2, 0)), sub(d(1, 0), d(0, 1))]
    };
    let omega: Vec<Vec<f64>> = omega_h.iter().map(|s| sp.inverse(s)).collect();
    let mut src = vec![vec![zero; u.grid.len()]; omega.len()];
    let prod = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x * y).collect() };
    if dim == 2 {
        // -d_j(u_j omega)
        for j in 0..2 {
            let dj = sp.derivative(&sp.forward(&prod(&u.components[j], &omega[0])), j);
            for (s, v) in src[0].iter_mut().zip(dj) {
                *s -= v;
            }
        }
    } else {
        // d_j(omega_j u_i - omega_i u_j)
        for (i, si) in src.iter_mut().enumerate() {
            for j in 0..3 {
                let f: Vec<f64> = (0..u.grid.len())
                    .map(|p| omega[j][p] * u.components[i][p] - omega[i][p] * u.components[j][p])
                    .collect();
                for (s, v) in si.iter_mut().zip(sp.derivative(&sp.forward(&f), j)) {
                    *s += v;
                }
            }
        }
    }
    for s in src.iter_mut() {
        for (idx, v) in s.iter_mut().enumerate() {
            if !sp.keeps(idx) {
                *v = zero;
            }
        }
    }
    Ok((omega_h, src))
}

/// Residual of the vorticity equation in one-step semigroup form,
/// `|omega_{n+1} - S(dt) omega_n - int_0^dt S(dt - s) N ds| / dt`, with the
/// same exponential trapezoid used by the mild solver.
pub fn vorticity_residual(traj: &Trajectory) -> Result<VorticityResidual> {
    traj.validate()?;
    if traj.len() < 2 {
        return Err(Error::Data("vorticity residual needs at least 2 snapshots".into()));
    }
    let sp = Spectral::new(traj.grid());
    let pairs: Vec<(Vec<Spectrum>, Vec<Spectrum>)> = traj
        .fields
        .iter()
        .map(|f| vorticity_and_source(&sp, f))
        .collect::<Result<_>>()?;
    let mut weights = StepWeights::new(&sp, traj.fields[1].time - traj.fields[0].time);
    let mut residual: f64 = 0.0;
    let mut omega_sup: f64 = 0.0;
    for (w, _) in &pairs {
        let phys: Vec<Vec<f64>> = w.iter().map(|s| sp.inverse(s)).collect();
        for p in 0..traj.grid().len() {
            omega_sup = omega_sup.max(phys.iter().map(|c| c[p] * c[p]).sum::<f64>().sqrt());
        }
    }
    for n in 0..traj.len() - 1 {
        let dt = traj.fields[n + 1].time - traj.fields[n].time;
        weights.update(&sp, dt);
        let mut pred = pairs[n].0.clone();
        weights.step(&mut pred, &pairs[n].1, &pairs[n + 1].1);
        let defect: Vec<Vec<f64>> = pred
            .iter()
            .zip(&pairs[n + 1].0)
            .map(|(a, b)| sp.inverse(&b.iter().zip(a).map(|(x, y)| x - y).collect::<Vec<_>>()))
            .collect();
        for p in 0..traj.grid().len() {
            let m = defect.iter().map(|c| c[p] * c[p]).sum::<f64>().sqrt();
            residual = residual.max(m / dt);
        }
    }
    let relative = residual / omega_sup.max(1.0);
    Ok(VorticityResidual {
        residual,
        relative,
        flagged: relative > VorticityResidual::FLAG_THRESHOLD,
    })
}
