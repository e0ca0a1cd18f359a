use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::trajectory::Trajectory;
use crate::error::Result;
use crate::fields::spectral::Spectrum;
use crate::fields::{Spectral, VectorField};

/// Spectral evaluation of `-P div(u (x) v)` with the 2/3 rule applied to the
/// product.
pub struct Nonlinearity<'a> {
    sp: &'a Spectral,
}

impl<'a> Nonlinearity<'a> {
    pub fn new(sp: &'a Spectral) -> Self {
        Self { sp }
    }

    /// Components of `-P d_j(u_j v_i)` in spectral space.
    pub fn eval(&self, u: &VectorField, v: &VectorField) -> Vec<Spectrum> {
        let sp = self.sp;
        let g = sp.grid();
        let dim = g.dim();
        let zero = Complex64::new(0.0, 0.0);
        let mut out = vec![vec![zero; g.len()]; dim];
        for (i, oi) in out.iter_mut().enumerate() {
            for j in 0..dim {
                let prod: Vec<f64> = u.components[j]
                    .iter()
                    .zip(&v.components[i])
                    .map(|(a, b)| a * b)
                    .collect();
                let d = sp.derivative(&sp.forward(&prod), j);
                for (o, x) in oi.iter_mut().zip(d) {
                    *o -= x;
                }
            }
            for (idx, o) in oi.iter_mut().enumerate() {
                if !sp.keeps(idx) {
                    *o = zero;
                }
            }
        }
        sp.project_in_place(&mut out);
        out
    }
}

fn psi(z: f64) -> f64 {
    if z < 0.5 {
        // sum_p (-z)^p (p + 1) / (p + 2)!
        let mut fact = 2.0;
        let mut zp = 1.0;
        let mut s = 0.0;
        for p in 0..30 {
            s += zp * (p + 1) as f64 / fact;
            zp *= -z;
            fact *= (p + 3) as f64;
        }
        s
    } else {
        (1.0 - (-z).exp() * (1.0 + z)) / (z * z)
    }
}

fn phi1(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        -(-z).exp_m1() / z
    }
}

/// Weights `(decay, w_start, w_end)` integrating `exp(-lambda (dt - s))`
/// against the linear interpolant of the forcing on one step.
pub fn duhamel_weights(lambda: f64, dt: f64) -> (f64, f64, f64) {
    let z = lambda * dt;
    let p = psi(z);
    ((-z).exp(), dt * p, dt * (phi1(z) - p))
}

/// Per-mode weights for one step length.
pub(crate) struct StepWeights {
    dt: f64,
    table: Vec<(f64, f64, f64)>,
}

impl StepWeights {
    pub(crate) fn new(sp: &Spectral, dt: f64) -> Self {
        let table = sp.wavenumbers_sq().iter().map(|&l| duhamel_weights(l, dt)).collect();
        Self { dt, table }
    }

    /// Recompute only when the step length changes.
    pub(crate) fn update(&mut self, sp: &Spectral, dt: f64) {
        if (dt - self.dt).abs() > 1e-14 * self.dt {
            *self = Self::new(sp, dt);
        }
    }

    /// Advance `acc` one step of the Duhamel recursion in place.
    pub(crate) fn step(&self, acc: &mut [Spectrum], g_start: &[Spectrum], g_end: &[Spectrum]) {
        for c in 0..acc.len() {
            for (idx, &(e, wa, wb)) in self.table.iter().enumerate() {
                acc[c][idx] = acc[c][idx] * e + g_start[c][idx] * wa + g_end[c][idx] * wb;
            }
        }
    }
}

/// `B(u, v)(t) = -int_0^t S(t - s) P div(u (x) v)(s) ds` on the snapshot grid.
/// The forcing is interpolated linearly in time between snapshots and the
/// semigroup is integrated exactly against it.
pub fn bilinear_b(u: &Trajectory, v: &Trajectory) -> Result<Trajectory> {
    u.validate()?;
    v.validate()?;
    u.check_compatible(v)?;
    let sp = Spectral::new(u.grid());
    let nl = Nonlinearity::new(&sp);
    let forcing: Vec<Vec<Spectrum>> = u
        .fields
        .par_iter()
        .zip(&v.fields)
        .map(|(a, b)| nl.eval(a, b))
        .collect();
    let dim = u.grid().dim();
    let len = u.grid().len();
    let mut acc = vec![vec![Complex64::new(0.0, 0.0); len]; dim];
    let mut specs = Vec::with_capacity(u.len());
    specs.push(acc.clone());
    let mut weights = StepWeights::new(&sp, u.fields.get(1).map_or(u.dt, |f| f.time - u.fields[0].time));
    for n in 0..u.len() - 1 {
        weights.update(&sp, u.fields[n + 1].time - u.fields[n].time);
        weights.step(&mut acc, &forcing[n], &forcing[n + 1]);
        specs.push(acc.clone());
    }
    let fields = specs
        .par_iter()
        .zip(&u.fields)
        .map(|(s, f)| sp.inverse_vector(s, f.time))
        .collect();
    let mut out = Trajectory::new(fields, u.dt, "duhamel-exponential-trapezoid")?;
    out.tolerances = u.tolerances.clone();
    Ok(out)
}
