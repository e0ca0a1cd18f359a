//! Sparse linear algebra for the finite-difference solvers: a banded LU
//! factorization without pivoting (sufficient for the diagonally dominant
//! M-matrices produced by implicit diffusion) and Jacobi-preconditioned
//! conjugate gradients.

use crate::error::{Error, Result};

/// Square band matrix with `lower` sub-diagonals and `upper` super-diagonals.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    // row-major, each row holds columns i-lower ..= i+upper
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn new(n: usize, lower: usize, upper: usize) -> Self {
        Self {
            n,
            lower,
            upper,
            data: vec![0.0; n * (lower + upper + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.lower >= i && j <= i + self.upper, "({i},{j}) outside band");
        i * (self.lower + self.upper + 1) + (j + self.lower - i)
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.lower < i || j > i + self.upper {
            0.0
        } else {
            self.data[self.slot(i, j)]
        }
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let lo = i.saturating_sub(self.lower);
            let hi = (i + self.upper).min(self.n - 1);
            let mut acc = 0.0;
            for j in lo..=hi {
                acc += self.data[self.slot(i, j)] * x[j];
            }
            y[i] = acc;
        }
    }

    /// In-place Doolittle factorization. Fails on a vanishing pivot.
    pub fn factor(mut self) -> Result<BandLu> {
        let n = self.n;
        for k in 0..n {
            let pivot = self.data[self.slot(k, k)];
            if pivot.abs() < 1e-300 || !pivot.is_finite() {
                return Err(Error::Solver {
                    message: format!("zero pivot at row {k} in banded LU"),
                    residual: f64::NAN,
                });
            }
            let row_end = (k + self.lower).min(n - 1);
            let col_end = (k + self.upper).min(n - 1);
            for i in k + 1..=row_end {
                let s = self.slot(i, k);
                let l = self.data[s] / pivot;
                self.data[s] = l;
                if l == 0.0 {
                    continue;
                }
                for j in k + 1..=col_end {
                    let skj = self.slot(k, j);
                    let sij = self.slot(i, j);
                    self.data[sij] -= l * self.data[skj];
                }
            }
        }
        Ok(BandLu { m: self })
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
}

impl BandLu {
    pub fn size(&self) -> usize {
        self.m.n
    }

    pub fn solve(&self, b: &mut [f64]) {
        let m = &self.m;
        let n = m.n;
        assert_eq!(b.len(), n);
        for i in 0..n {
            let lo = i.saturating_sub(m.lower);
            let mut acc = b[i];
            for j in lo..i {
                acc -= m.data[m.slot(i, j)] * b[j];
            }
            b[i] = acc;
        }
        for i in (0..n).rev() {
            let hi = (i + m.upper).min(n - 1);
            let mut acc = b[i];
            for j in i + 1..=hi {
                acc -= m.data[m.slot(i, j)] * b[j];
            }
            b[i] = acc / m.data[m.slot(i, i)];
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CgStats {
    pub iterations: usize,
    pub residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for a symmetric positive definite
/// operator. `x` holds the initial guess on entry and the solution on exit.
/// Convergence is declared when `||r||_2 <= tol * max(||b||_2, 1e-300)`.
pub fn conjugate_gradient<A>(
    apply: A,
    diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<CgStats>
where
    A: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgStats {
            iterations: 0,
            residual: 0.0,
        });
    }
    let mut ax = vec![0.0; n];
    apply(x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let target = tol * bnorm;
    let mut res = norm2(&r);
    for it in 0..max_iter {
        if res <= target {
            return Ok(CgStats {
                iterations: it,
                residual: res / bnorm,
            });
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            return Err(Error::Solver {
                message: "conjugate gradients met a non-positive curvature direction".into(),
                residual: res / bnorm,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = norm2(&r);
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if res <= target {
        return Ok(CgStats {
            iterations: max_iter,
            residual: res / bnorm,
        });
    }
    Err(Error::Solver {
        message: format!("conjugate gradients did not converge in {max_iter} iterations"),
        residual: res / bnorm,
    })
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poisson_1d(n: usize) -> BandMatrix {
        let mut m = BandMatrix::new(n, 1, 1);
        for i in 0..n {
            m.add(i, i, 2.0);
            if i > 0 {
                m.add(i, i - 1, -1.0);
            }
            if i + 1 < n {
                m.add(i, i + 1, -1.0);
            }
        }
        m
    }

    #[test]
    fn banded_lu_solves_tridiagonal() {
        let n = 50;
        let m = poisson_1d(n);
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut b = vec![0.0; n];
        m.mul_vec(&x_true, &mut b);
        let lu = m.factor().unwrap();
        lu.solve(&mut b);
        for (a, e) in b.iter().zip(&x_true) {
            assert!((a - e).abs() < 1e-11);
        }
    }

    #[test]
    fn cg_matches_direct_solve() {
        let n = 40;
        let m = poisson_1d(n);
        let b: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let mut x = vec![0.0; n];
        let diag = vec![2.0; n];
        let stats = conjugate_gradient(|v, out| m.mul_vec(v, out), &diag, &b, &mut x, 1e-12, 200).unwrap();
        assert!(stats.iterations <= n + 1);
        let mut direct = b.clone();
        m.clone().factor().unwrap().solve(&mut direct);
        for (a, e) in x.iter().zip(&direct) {
            assert!((a - e).abs() < 1e-8 * e.abs().max(1.0));
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let m = BandMatrix::new(3, 1, 1);
        assert!(matches!(m.factor(), Err(Error::Solver { .. })));
    }
}
