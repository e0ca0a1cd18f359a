use super::bilinear::bilinear_b;
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::fields::Spectral;

pub const DEFAULT_HEAT_TOLERANCE: f64 = 1e-8;

/// `u = v + w + b(t)`: forced part, caloric part and spatially constant drift.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub v: Trajectory,
    pub w: Trajectory,
    pub times: Vec<f64>,
    /// Drift normalized by `b(0) = 0`.
    pub b: Vec<Vec<f64>>,
    /// Second-order finite-difference derivative of `b`.
    pub b_prime: Vec<Vec<f64>>,
    /// `max_n |w_{n+1} - S(dt_n) w_n|_inf`, not divided by the step.
    pub heat_residual: f64,
    /// `sup_t |u - (v + w + b)|_inf`.
    pub reconstruction_error: f64,
}

/// Second-order derivative on a possibly non-uniform time grid: three-point
/// formula everywhere, one-sided at the ends.
fn derivative(times: &[f64], values: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = times.len();
    let dim = values[0].len();
    if n == 1 {
        return vec![vec![0.0; dim]];
    }
    if n == 2 {
        let d: Vec<f64> = (0..dim)
            .map(|a| (values[1][a] - values[0][a]) / (times[1] - times[0]))
            .collect();
        return vec![d.clone(), d];
    }
    // derivative at x0 of the parabola through (x_j, y_j)
    let three = |x0: f64, xs: [f64; 3], ys: [f64; 3]| -> f64 {
        let mut s = 0.0;
        for j in 0..3 {
            let mut w = 0.0;
            for m in 0..3 {
                if m == j {
                    continue;
                }
                let mut p = 1.0 / (xs[j] - xs[m]);
                for q in 0..3 {
                    if q != j && q != m {
                        p *= (x0 - xs[q]) / (xs[j] - xs[q]);
                    }
                }
                w += p;
            }
            s += w * ys[j];
        }
        s
    };
    (0..n)
        .map(|i| {
            let c = i.clamp(1, n - 2);
            let xs = [times[c - 1], times[c], times[c + 1]];
            (0..dim)
                .map(|a| three(times[i], xs, [values[c - 1][a], values[c][a], values[c + 1][a]]))
                .collect()
        })
        .collect()
}

/// Split a trajectory into `v + w + b`.
///
/// With `forcing_from_u` the forced part is `v = B(u, u)`, the mild solution
/// with zero datum and forcing `-u_k u`; otherwise `v = 0`. The drift `b` is the
/// change of the spatial mean of `u - v` since the first snapshot and
/// `w = u - v - b`. Fails when `w` is not caloric to `heat_tolerance`.
pub fn decompose(u: &Trajectory, forcing_from_u: bool, heat_tolerance: f64) -> Result<Decomposition> {
    u.validate()?;
    let v = if forcing_from_u { bilinear_b(u, u)? } else { u.zeros_like() };
    let times = u.times();
    let mut r = u.clone();
    for (f, g) in r.fields.iter_mut().zip(&v.fields) {
        f.axpy(-1.0, g);
    }
    let m0 = r.fields[0].component_means();
    let b: Vec<Vec<f64>> = r
        .fields
        .iter()
        .map(|f| f.component_means().iter().zip(&m0).map(|(m, z)| m - z).collect())
        .collect();
    let mut w = r;
    w.scheme = "caloric".into();
    for (f, bn) in w.fields.iter_mut().zip(&b) {
        for (c, shift) in f.components.iter_mut().zip(bn) {
            for x in c.iter_mut() {
                *x -= shift;
            }
        }
    }
    let sp = Spectral::new(u.grid());
    let mut heat_residual: f64 = 0.0;
    for n in 0..w.len().saturating_sub(1) {
        let dt = w.fields[n + 1].time - w.fields[n].time;
        let mut spec = sp.forward_vector(&w.fields[n]);
        for s in spec.iter_mut() {
            sp.heat_in_place(s, dt);
        }
        let pred = sp.inverse_vector(&spec, w.fields[n + 1].time);
        heat_residual = heat_residual.max(pred.sup_distance(&w.fields[n + 1]));
    }
    let mut reconstruction_error: f64 = 0.0;
    for n in 0..u.len() {
        let mut s = v.fields[n].clone();
        s.axpy(1.0, &w.fields[n]);
        for (c, shift) in s.components.iter_mut().zip(&b[n]) {
            for x in c.iter_mut() {
                *x += shift;
            }
        }
        reconstruction_error = reconstruction_error.max(s.sup_distance(&u.fields[n]));
    }
    if !(heat_residual <= heat_tolerance) {
        return Err(Error::Decomposition {
            residual: heat_residual,
            tolerance: heat_tolerance,
        });
    }
    let b_prime = derivative(&times, &b);
    Ok(Decomposition {
        v,
        w,
        times,
        b,
        b_prime,
        heat_residual,
        reconstruction_error,
    })
}
