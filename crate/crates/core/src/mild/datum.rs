//! Initial data used by the mild solver and the acceptance runs.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::spectral::signed_mode;
use crate::fields::{Spectral, TorusGrid, VectorField};

pub use crate::fields::taylor_green;

/// Arnold-Beltrami-Childress flow; `curl u = u`, so it decays as `e^{-t}`
/// under Navier-Stokes.
pub fn abc_flow(grid: TorusGrid, a: f64, b: f64, c: f64) -> Result<VectorField> {
    if grid.dim() != 3 {
        return Err(Error::Dimension("ABC flow is three-dimensional".into()));
    }
    Ok(VectorField::from_fn(grid, 0.0, |x| {
        [
            a * x[2].sin() + c * x[1].cos(),
            b * x[0].sin() + a * x[2].cos(),
            c * x[1].sin() + b * x[0].cos(),
        ]
    }))
}

/// Random divergence-free field with Fourier support in the shell
/// `k_lo <= |k| <= k_hi` (integer wavenumbers on the 2 pi torus), scaled to
/// unit sup norm. Deterministic in `seed`.
pub fn random_band(grid: TorusGrid, seed: u64, k_lo: f64, k_hi: f64) -> Result<VectorField> {
    random_band_weighted(grid, seed, k_lo, k_hi, 0.0)
}

/// As [`random_band`], with mode amplitudes weighted by `|k|^{-slope}`.
pub fn random_band_weighted(
    grid: TorusGrid,
    seed: u64,
    k_lo: f64,
    k_hi: f64,
    slope: f64,
) -> Result<VectorField> {
    if !(k_lo >= 0.0) || !(k_hi >= k_lo) {
        return Err(Error::InvalidInput(format!("bad wavenumber band [{k_lo}, {k_hi}]")));
    }
    let n = grid.n();
    if k_hi >= (n / 2) as f64 {
        return Err(Error::InvalidInput(format!(
            "band edge {k_hi} reaches the Nyquist mode of an N = {n} grid"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sp = Spectral::new(grid);
    let dim = grid.dim();
    let mut spec = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; dim];
    let mut filled = 0;
    for idx in 0..grid.len() {
        let m = grid.multi_index(idx);
        let k = (0..dim)
            .map(|a| (signed_mode(m[a], n) as f64).powi(2))
            .sum::<f64>()
            .sqrt();
        if k >= k_lo && k <= k_hi && k > 0.0 {
            let weight = k.powf(-slope);
            for s in spec.iter_mut() {
                s[idx] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * weight;
            }
            filled += 1;
        }
    }
    if filled == 0 {
        return Err(Error::InvalidInput(format!("band [{k_lo}, {k_hi}] contains no modes")));
    }
    sp.project_in_place(&mut spec);
    let f = sp.inverse_vector(&spec, 0.0);
    let s = f.sup_norm();
    if s == 0.0 {
        return Err(Error::InvalidInput("random band produced a zero field".into()));
    }
    Ok(f.scaled(1.0 / s))
}

/// Shear flow `(0, s(x1))` with `s` the unit square wave smoothed by the heat
/// semigroup for time `(2h)^2`, `h` the grid spacing. Under Navier-Stokes it
/// evolves by the heat equation alone; near each jump the profile is an
/// error function.
pub fn erf_profile(grid: TorusGrid) -> Result<VectorField> {
    let n = grid.n();
    let l = grid.period();
    let h = grid.spacing();
    let t0 = (2.0 * h).powi(2);
    let base = 2.0 * PI / l;
    let modes: Vec<(f64, f64)> = (1..n / 2)
        .step_by(2)
        .map(|m| {
            let k = base * m as f64;
            (k, 4.0 / (PI * m as f64) * (-k * k * t0).exp())
        })
        .collect();
    Ok(VectorField::from_fn(grid, 0.0, |x| {
        let s: f64 = modes.iter().map(|(k, a)| a * (k * x[0]).sin()).sum();
        [0.0, s, 0.0]
    }))
}
