//! Fourier machinery on the torus: multi-dimensional FFTs, wavenumber
//! tables and the spectral differential operators built on them.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::torus::{ScalarField, TorusGrid, VectorField};
use crate::error::{Error, Result};

pub type Spectrum = Vec<Complex64>;

/// Signed integer mode for FFT index `i` of an `n`-point transform.
pub fn signed_mode(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// FFT plans and per-mode wavenumber tables for one grid.
///
/// First-derivative symbols drop the Nyquist mode; the Laplacian symbol keeps
/// it. The projection is built from the first-derivative symbols so that
/// `div P v = 0` holds mode by mode.
#[derive(Clone)]
pub struct Spectral {
    grid: TorusGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    kvec: Vec<[f64; 3]>,
    ksq: Vec<f64>,
    kd_sq: Vec<f64>,
    dealias: Vec<bool>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: TorusGrid) -> Self {
        let n = grid.n();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let base = 2.0 * PI / grid.period();
        let len = grid.len();
        let mut kvec = Vec::with_capacity(len);
        let mut ksq = Vec::with_capacity(len);
        let mut kd_sq = Vec::with_capacity(len);
        let mut dealias = Vec::with_capacity(len);
        let cutoff = n as i64 / 3;
        for idx in 0..len {
            let m = grid.multi_index(idx);
            let mut kd = [0.0; 3];
            let mut k2 = 0.0;
            let mut keep = true;
            for a in 0..grid.dim() {
                let s = signed_mode(m[a], n);
                let k = base * s as f64;
                k2 += k * k;
                if m[a] != n / 2 {
                    kd[a] = k;
                }
                if s.abs() > cutoff {
                    keep = false;
                }
            }
            kd_sq.push(kd.iter().map(|k| k * k).sum());
            kvec.push(kd);
            ksq.push(k2);
            dealias.push(keep);
        }
        Self {
            grid,
            forward,
            inverse,
            kvec,
            ksq,
            kd_sq,
            dealias,
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    /// First-derivative wavevector of flat mode `idx`.
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        self.kvec[idx]
    }

    /// `|k|^2` of flat mode `idx` (Laplacian symbol is `-|k|^2`).
    pub fn wavenumber_sq(&self, idx: usize) -> f64 {
        self.ksq[idx]
    }

    pub fn wavenumbers_sq(&self) -> &[f64] {
        &self.ksq
    }

    /// Whether mode `idx` survives 2/3-rule truncation.
    pub fn keeps(&self, idx: usize) -> bool {
        self.dealias[idx]
    }

    fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.grid.n();
        let dim = self.grid.dim();
        let plan = if inverse { &self.inverse } else { &self.forward };
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        // last axis is contiguous
        plan.process_with_scratch(buf, &mut scratch);
        let mut lines = vec![Complex64::new(0.0, 0.0); buf.len()];
        for axis in 0..dim - 1 {
            let stride = n.pow((dim - 1 - axis) as u32);
            let outer = buf.len() / (n * stride);
            let mut p = 0;
            for o in 0..outer {
                for inner in 0..stride {
                    let base = o * n * stride + inner;
                    for j in 0..n {
                        lines[p] = buf[base + j * stride];
                        p += 1;
                    }
                }
            }
            plan.process_with_scratch(&mut lines, &mut scratch);
            let mut p = 0;
            for o in 0..outer {
                for inner in 0..stride {
                    let base = o * n * stride + inner;
                    for j in 0..n {
                        buf[base + j * stride] = lines[p];
                        p += 1;
                    }
                }
            }
        }
    }

    pub fn forward(&self, data: &[f64]) -> Spectrum {
        assert_eq!(data.len(), self.grid.len());
        let mut buf: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, false);
        buf
    }

    /// Inverse transform, normalized, keeping the real part.
    pub fn inverse(&self, spec: &[Complex64]) -> Vec<f64> {
        let mut buf = spec.to_vec();
        self.transform(&mut buf, true);
        let scale = 1.0 / self.grid.len() as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    /// `d/dx_axis` in spectral space.
    pub fn derivative(&self, spec: &[Complex64], axis: usize) -> Spectrum {
        spec.iter()
            .enumerate()
            .map(|(i, c)| Complex64::new(0.0, self.kvec[i][axis]) * c)
            .collect()
    }

    pub fn laplacian_spec(&self, spec: &[Complex64]) -> Spectrum {
        spec.iter().enumerate().map(|(i, c)| c * (-self.ksq[i])).collect()
    }

    /// Leray-Helmholtz projection of a vector spectrum in place. The mean mode
    /// is left untouched.
    pub fn project_in_place(&self, comps: &mut [Spectrum]) {
        let dim = self.grid.dim();
        for idx in 0..self.grid.len() {
            let k2 = self.kd_sq[idx];
            if k2 == 0.0 {
                continue;
            }
            let k = self.kvec[idx];
            let mut kdotv = Complex64::new(0.0, 0.0);
            for a in 0..dim {
                kdotv += comps[a][idx] * k[a];
            }
            let f = kdotv / k2;
            for a in 0..dim {
                comps[a][idx] -= f * k[a];
            }
        }
    }

    /// Multiply by the heat symbol `exp(-|k|^2 t)`.
    pub fn heat_in_place(&self, spec: &mut [Complex64], t: f64) {
        for (i, c) in spec.iter_mut().enumerate() {
            *c *= (-self.ksq[i] * t).exp();
        }
    }

    pub fn forward_vector(&self, v: &VectorField) -> Vec<Spectrum> {
        v.components.iter().map(|c| self.forward(c)).collect()
    }

    pub fn inverse_vector(&self, spec: &[Spectrum], time: f64) -> VectorField {
        VectorField {
            grid: self.grid,
            components: spec.iter().map(|s| self.inverse(s)).collect(),
            time,
        }
    }

    fn check(&self, grid: TorusGrid) -> Result<()> {
        if grid != self.grid {
            return Err(Error::Shape("field grid differs from spectral context grid".into()));
        }
        Ok(())
    }

    pub fn divergence(&self, v: &VectorField) -> Result<ScalarField> {
        self.check(v.grid)?;
        v.validate()?;
        let mut acc = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for (a, c) in v.components.iter().enumerate() {
            let d = self.derivative(&self.forward(c), a);
            for (x, y) in acc.iter_mut().zip(d) {
                *x += y;
            }
        }
        Ok(ScalarField {
            grid: self.grid,
            samples: self.inverse(&acc),
            time: v.time,
        })
    }

    /// `u_{2,1} - u_{1,2}`.
    pub fn curl2d(&self, v: &VectorField) -> Result<ScalarField> {
        if v.dim() != 2 {
            return Err(Error::Dimension(format!(
                "curl2d needs a 2D field, got dimension {}",
                v.dim()
            )));
        }
        self.check(v.grid)?;
        v.validate()?;
        let spec = self.forward_vector(v);
        let d21 = self.derivative(&spec[1], 0);
        let d12 = self.derivative(&spec[0], 1);
        let w: Spectrum = d21.iter().zip(&d12).map(|(a, b)| a - b).collect();
        Ok(ScalarField {
            grid: self.grid,
            samples: self.inverse(&w),
            time: v.time,
        })
    }

    /// Vorticity of a 3D field as a vector field.
    pub fn curl3d(&self, v: &VectorField) -> Result<VectorField> {
        if v.dim() != 3 {
            return Err(Error::Dimension("curl3d needs a 3D field".into()));
        }
        self.check(v.grid)?;
        let spec = self.forward_vector(v);
        let d = |c: usize, a: usize| self.derivative(&spec[c], a);
        let sub = |x: Spectrum, y: Spectrum| -> Spectrum { x.iter().zip(&y).map(|(a, b)| a - b).collect() };
        let w = vec![sub(d(2, 1), d(1, 2)), sub(d(0, 2), d(2, 0)), sub(d(1, 0), d(0, 1))];
        Ok(self.inverse_vector(&w, v.time))
    }

    pub fn gradient(&self, f: &ScalarField) -> Result<VectorField> {
        self.check(f.grid)?;
        f.validate()?;
        let s = self.forward(&f.samples);
        let comps = (0..self.grid.dim())
            .map(|a| self.inverse(&self.derivative(&s, a)))
            .collect();
        Ok(VectorField {
            grid: self.grid,
            components: comps,
            time: f.time,
        })
    }

    pub fn helmholtz_project(&self, v: &VectorField) -> Result<VectorField> {
        self.check(v.grid)?;
        v.validate()?;
        let mut spec = self.forward_vector(v);
        self.project_in_place(&mut spec);
        Ok(self.inverse_vector(&spec, v.time))
    }

    /// Full velocity gradient: `out[i][j] = d_j u_i`.
    pub fn velocity_gradient(&self, v: &VectorField) -> Vec<Vec<Vec<f64>>> {
        let spec = self.forward_vector(v);
        spec.iter()
            .map(|s| {
                (0..self.grid.dim())
                    .map(|a| self.inverse(&self.derivative(s, a)))
                    .collect()
            })
            .collect()
    }

    /// All second derivatives: `out[i][j][l] = d_j d_l u_i` (symmetric in j, l).
    pub fn velocity_hessian(&self, v: &VectorField) -> Vec<Vec<Vec<Vec<f64>>>> {
        let spec = self.forward_vector(v);
        let dim = self.grid.dim();
        spec.iter()
            .map(|s| {
                (0..dim)
                    .map(|j| {
                        let dj = self.derivative(s, j);
                        (0..dim).map(|l| self.inverse(&self.derivative(&dj, l))).collect()
                    })
                    .collect()
            })
            .collect()
    }
}

pub fn divergence(v: &VectorField) -> Result<ScalarField> {
    Spectral::new(v.grid).divergence(v)
}

pub fn curl2d(v: &VectorField) -> Result<ScalarField> {
    Spectral::new(v.grid).curl2d(v)
}

pub fn gradient(f: &ScalarField) -> Result<VectorField> {
    Spectral::new(f.grid).gradient(f)
}

pub fn helmholtz_project(v: &VectorField) -> Result<VectorField> {
    Spectral::new(v.grid).helmholtz_project(v)
}
