//! Off-grid evaluation of the trigonometric interpolant of a torus field and
//! sub-grid location of extrema.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use super::spectral::{signed_mode, Spectral};
use super::torus::{ScalarField, TorusGrid};

/// Evaluates the band-limited interpolant of one scalar field at arbitrary
/// points, with first and second derivatives.
#[derive(Debug, Clone)]
pub struct PointEvaluator {
    grid: TorusGrid,
    coeff: Vec<Complex64>,
    k: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct Jet {
    pub value: f64,
    pub grad: [f64; 3],
    pub hess: [[f64; 3]; 3],
}

impl PointEvaluator {
    pub fn new(spectral: &Spectral, samples: &[f64]) -> Self {
        let grid = spectral.grid();
        let scale = 1.0 / grid.len() as f64;
        let coeff = spectral.forward(samples).into_iter().map(|c| c * scale).collect();
        let base = 2.0 * PI / grid.period();
        let k = (0..grid.n()).map(|i| base * signed_mode(i, grid.n()) as f64).collect();
        Self { grid, coeff, k }
    }

    pub fn from_field(f: &ScalarField) -> Self {
        Self::new(&Spectral::new(f.grid), &f.samples)
    }

    fn phases(&self, x: &[f64]) -> Vec<Vec<Complex64>> {
        (0..self.grid.dim())
            .map(|a| self.k.iter().map(|&k| Complex64::from_polar(1.0, k * x[a])).collect())
            .collect()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let ph = self.phases(x);
        let n = self.grid.n();
        let mut acc = Complex64::new(0.0, 0.0);
        match self.grid.dim() {
            2 => {
                for i in 0..n {
                    let mut row = Complex64::new(0.0, 0.0);
                    for j in 0..n {
                        row += self.coeff[i * n + j] * ph[1][j];
                    }
                    acc += row * ph[0][i];
                }
            }
            _ => {
                for i in 0..n {
                    let mut plane = Complex64::new(0.0, 0.0);
                    for j in 0..n {
                        let mut row = Complex64::new(0.0, 0.0);
                        for l in 0..n {
                            row += self.coeff[(i * n + j) * n + l] * ph[2][l];
                        }
                        plane += row * ph[1][j];
                    }
                    acc += plane * ph[0][i];
                }
            }
        }
        acc.re
    }

    /// Value, gradient and Hessian of the interpolant at `x`.
    pub fn jet(&self, x: &[f64]) -> Jet {
        let ph = self.phases(x);
        let dim = self.grid.dim();
        let mut v = Complex64::new(0.0, 0.0);
        let mut g = [Complex64::new(0.0, 0.0); 3];
        let mut h = [[Complex64::new(0.0, 0.0); 3]; 3];
        for idx in 0..self.grid.len() {
            let m = self.grid.multi_index(idx);
            let mut e = self.coeff[idx];
            if e.norm_sqr() == 0.0 {
                continue;
            }
            let mut kk = [0.0; 3];
            for a in 0..dim {
                e *= ph[a][m[a]];
                kk[a] = self.k[m[a]];
            }
            v += e;
            let ie = Complex64::new(-e.im, e.re);
            for a in 0..dim {
                g[a] += ie * kk[a];
                for b in 0..dim {
                    h[a][b] -= e * (kk[a] * kk[b]);
                }
            }
        }
        let mut jet = Jet {
            value: v.re,
            grad: [0.0; 3],
            hess: [[0.0; 3]; 3],
        };
        for a in 0..dim {
            jet.grad[a] = g[a].re;
            for b in 0..dim {
                jet.hess[a][b] = h[a][b].re;
            }
        }
        jet
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Extremum {
    pub value: f64,
    pub location: [f64; 3],
}

fn solve_small(a: [[f64; 3]; 3], b: [f64; 3], dim: usize) -> Option<[f64; 3]> {
    let mut m = a;
    let mut r = b;
    for c in 0..dim {
        let p = (c..dim).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() < 1e-300 {
            return None;
        }
        m.swap(c, p);
        r.swap(c, p);
        for i in c + 1..dim {
            let f = m[i][c] / m[c][c];
            for j in c..dim {
                m[i][j] -= f * m[c][j];
            }
            r[i] -= f * r[c];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..dim).rev() {
        let mut s = r[i];
        for j in i + 1..dim {
            s -= m[i][j] * x[j];
        }
        x[i] = s / m[i][i];
    }
    Some(x)
}

fn grid_local_extrema(f: &ScalarField, sign: f64) -> Vec<usize> {
    let g = f.grid;
    let n = g.n();
    let mut out = Vec::new();
    for idx in 0..g.len() {
        let v = sign * f.samples[idx];
        let m = g.multi_index(idx);
        let mut is_ext = true;
        for a in 0..g.dim() {
            for step in [1, n - 1] {
                let mut mm = m;
                mm[a] = (m[a] + step) % n;
                if sign * f.samples[g.flat_index(mm)] > v {
                    is_ext = false;
                }
            }
        }
        if is_ext {
            out.push(idx);
        }
    }
    out.sort_by(|&i, &j| (sign * f.samples[j]).total_cmp(&(sign * f.samples[i])));
    out
}

/// Maximum (`sign = 1`) or minimum (`sign = -1`) of the trigonometric
/// interpolant, found by Newton refinement from the best grid extrema.
fn refined(f: &ScalarField, sign: f64, candidates: usize) -> Extremum {
    let g = f.grid;
    let dim = g.dim();
    let h = g.spacing();
    let ev = PointEvaluator::from_field(f);
    let mut best = Extremum {
        value: f64::NEG_INFINITY,
        location: [0.0; 3],
    };
    let starts = grid_local_extrema(f, sign);
    for &idx in starts.iter().take(candidates) {
        let mut x = g.coords(idx);
        let mut jet = ev.jet(&x);
        let mut val = sign * jet.value;
        for _ in 0..30 {
            let mut hs = jet.hess;
            let mut gs = jet.grad;
            for a in 0..dim {
                gs[a] *= sign;
                for b in 0..dim {
                    hs[a][b] *= -sign;
                }
            }
            // Newton on the ascent problem for sign*f: solve (-H) dx = g
            let newton = solve_small(hs, gs, dim);
            let mut dx = match newton {
                Some(d) if (0..dim).map(|a| d[a] * gs[a]).sum::<f64>() > 0.0 => d,
                _ => {
                    let gn = (0..dim).map(|a| gs[a] * gs[a]).sum::<f64>().sqrt();
                    if gn == 0.0 {
                        break;
                    }
                    let mut d = [0.0; 3];
                    for a in 0..dim {
                        d[a] = 0.25 * h * gs[a] / gn;
                    }
                    d
                }
            };
            let len = (0..dim).map(|a| dx[a] * dx[a]).sum::<f64>().sqrt();
            if len > h {
                for v in dx.iter_mut() {
                    *v *= h / len;
                }
            }
            let mut accepted = false;
            for _ in 0..8 {
                let mut xn = x;
                for a in 0..dim {
                    xn[a] += dx[a];
                }
                let jn = ev.jet(&xn);
                if sign * jn.value >= val {
                    x = xn;
                    jet = jn;
                    val = sign * jn.value;
                    accepted = true;
                    break;
                }
                for v in dx.iter_mut() {
                    *v *= 0.5;
                }
            }
            let step = (0..dim).map(|a| dx[a] * dx[a]).sum::<f64>().sqrt();
            if !accepted || step < 1e-14 * g.period() {
                break;
            }
        }
        if val > best.value {
            best = Extremum {
                value: val,
                location: x,
            };
        }
    }
    best.value *= sign;
    best
}

pub fn refined_max(f: &ScalarField) -> Extremum {
    refined(f, 1.0, 6)
}

pub fn refined_min(f: &ScalarField) -> Extremum {
    refined(f, -1.0, 6)
}

/// Sup of `|f|` over the interpolant rather than over grid nodes.
pub fn refined_sup_abs(f: &ScalarField) -> f64 {
    refined_max(f).value.max(-refined_min(f).value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolant_is_exact_for_band_limited_fields() {
        let g = TorusGrid::square(16).unwrap();
        let f = ScalarField::from_fn(g, 0.0, |x| (x[0] + 2.0 * x[1]).sin() + (3.0 * x[1]).cos());
        let ev = PointEvaluator::from_field(&f);
        let p: [f64; 3] = [0.123, 4.56, 0.0];
        let exact = (p[0] + 2.0 * p[1]).sin() + (3.0 * p[1]).cos();
        assert!((ev.value(&p) - exact).abs() < 1e-13);
        let jet = ev.jet(&p);
        assert!((jet.value - exact).abs() < 1e-13);
        let gx = (p[0] + 2.0 * p[1]).cos();
        let gy = 2.0 * (p[0] + 2.0 * p[1]).cos() - 3.0 * (3.0 * p[1]).sin();
        assert!((jet.grad[0] - gx).abs() < 1e-12);
        assert!((jet.grad[1] - gy).abs() < 1e-12);
        let hxy = -2.0 * (p[0] + 2.0 * p[1]).sin();
        assert!((jet.hess[0][1] - hxy).abs() < 1e-12);
    }

    #[test]
    fn refined_max_finds_off_grid_peak() {
        let g = TorusGrid::square(16).unwrap();
        let c = [1.2345, 2.3456];
        let f = ScalarField::from_fn(g, 0.0, |x| (x[0] - c[0]).cos() + (x[1] - c[1]).cos());
        let e = refined_max(&f);
        assert!((e.value - 2.0).abs() < 1e-13);
        assert!((e.location[0] - c[0]).abs() < 1e-6);
        let m = refined_min(&f);
        assert!((m.value + 2.0).abs() < 1e-13);
        assert!(f.max() < 2.0 - 1e-3);
    }

    #[test]
    fn evaluator_3d() {
        let g = TorusGrid::cube(8).unwrap();
        let f = ScalarField::from_fn(g, 0.0, |x| x[0].sin() * x[2].cos() + x[1].cos());
        let ev = PointEvaluator::from_field(&f);
        let p: [f64; 3] = [0.3, 1.1, 2.9];
        let exact = p[0].sin() * p[2].cos() + p[1].cos();
        assert!((ev.value(&p) - exact).abs() < 1e-13);
        assert!((ev.jet(&p).value - exact).abs() < 1e-13);
    }
}
