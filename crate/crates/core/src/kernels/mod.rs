//! Pointwise evaluation of the heat kernel, the Laplace fundamental solution,
//! the generating function `Phi(., t) = S(t) G` and the Oseen kernels
//! `K_ij = (-delta_ij Delta + d_i d_j) Phi`, `K_ijk = d_k K_ij`.
//!
//! Sign convention: `-Delta G = delta`, so `G = 1 / (4 pi |x|)` in three
//! dimensions and `G = -ln|x| / (2 pi)` in two. With this choice
//! `Delta Phi = -Gamma` and `Phi = G - int_0^t Gamma(., s) ds`.
//!
//! Axis indices are zero-based.

mod decay;
mod radial;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

pub use decay::{log_scales, sphere_samples, verify_decay, DecayFit, MIN_SCALES};

use crate::error::{Error, Result};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelKind {
    Gamma,
    G,
    Phi,
    Kij,
    Kijk,
}

impl KernelKind {
    pub fn index_count(self) -> usize {
        match self {
            KernelKind::Gamma | KernelKind::G | KernelKind::Phi => 0,
            KernelKind::Kij => 2,
            KernelKind::Kijk => 3,
        }
    }

    /// Decay exponent `p` in `|kernel| <= C (|x|^2 + t)^{-p/2}`.
    pub fn decay_exponent(self, n: usize) -> f64 {
        match self {
            KernelKind::Gamma | KernelKind::Kij => n as f64,
            KernelKind::Kijk => n as f64 + 1.0,
            KernelKind::G | KernelKind::Phi => n as f64 - 2.0,
        }
    }
}

impl std::str::FromStr for KernelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gamma" => Ok(KernelKind::Gamma),
            "g" => Ok(KernelKind::G),
            "phi" => Ok(KernelKind::Phi),
            "kij" => Ok(KernelKind::Kij),
            "kijk" => Ok(KernelKind::Kijk),
            _ => Err(Error::InvalidInput(format!("unknown kernel kind '{s}'"))),
        }
    }
}

/// How derivatives of `Phi` are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeMethod {
    /// Closed-form radial derivatives.
    #[default]
    Analytic,
    /// Fourth-order central differences of [`generating_phi`] with step
    /// [`fd_step`].
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelQuery {
    pub kind: KernelKind,
    pub indices: Vec<usize>,
    pub x: Vec<f64>,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub warning: Option<String>,
}

fn check_point(x: &[f64]) -> Result<usize> {
    let n = x.len();
    if n != 2 && n != 3 {
        return Err(Error::Dimension(format!("kernels are defined for n = 2, 3; got {n}")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite point".into()));
    }
    Ok(n)
}

fn sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn check_regular(x: &[f64], t: f64) -> Result<usize> {
    let n = check_point(x)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be non-negative, got {t}")));
    }
    if t == 0.0 && sq(x) == 0.0 {
        return Err(Error::Singular("kernel evaluated at (x, t) = (0, 0)".into()));
    }
    Ok(n)
}

/// `(4 pi t)^{-n/2} exp(-|x|^2 / 4t)`.
pub fn heat_kernel(x: &[f64], t: f64) -> Result<f64> {
    let n = check_point(x)?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("heat kernel needs t > 0, got {t}")));
    }
    Ok((4.0 * PI * t).powf(-(n as f64) / 2.0) * (-sq(x) / (4.0 * t)).exp())
}

/// Fundamental solution with `-Delta G = delta`.
pub fn laplace_green(x: &[f64]) -> Result<f64> {
    let n = check_point(x)?;
    let r = sq(x).sqrt();
    if r == 0.0 {
        return Err(Error::Singular("Laplace fundamental solution at x = 0".into()));
    }
    Ok(if n == 3 {
        1.0 / (4.0 * PI * r)
    } else {
        -r.ln() / (2.0 * PI)
    })
}

type PhiCache = RwLock<HashMap<(u64, u64), f64>>;

fn phi2_cache() -> &'static PhiCache {
    static CACHE: OnceLock<PhiCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

const PHI2_REL_TOL: f64 = 1e-10;

fn e1_at_one() -> f64 {
    static E1_ONE: OnceLock<f64> = OnceLock::new();
    *E1_ONE.get_or_init(|| {
        quad::integrate(|v: f64| (-v.exp()).exp(), 0.0, 41f64.ln(), 1e-16, 1e-13)
            .expect("smooth integrand")
            .value
    })
}

/// Two-dimensional `Phi` from `Phi = G - int_0^t Gamma ds`, with the time
/// integral reduced to `int exp(-e^v) dv` and evaluated adaptively.
fn phi2(rho: f64, t: f64) -> Result<f64> {
    let key = (rho.to_bits(), t.to_bits());
    if let Some(v) = phi2_cache().read().expect("cache lock").get(&key) {
        return Ok(*v);
    }
    let y = rho * rho / (4.0 * t);
    let value = if y >= 1.0 {
        let upper = (y + 40.0).ln();
        let e1 = quad::integrate(|v: f64| (-v.exp()).exp(), y.ln(), upper, 1e-300, PHI2_REL_TOL)?;
        -rho.ln() / (2.0 * PI) - e1.value / (4.0 * PI)
    } else {
        let lower = if y > 0.0 { y.ln().max(-40.0) } else { -40.0 };
        let inner = quad::integrate(|v: f64| (-v.exp()).exp_m1(), lower, 0.0, 1e-15, PHI2_REL_TOL)?;
        -((4.0 * t).ln() + inner.value + e1_at_one()) / (4.0 * PI)
    };
    let mut cache = phi2_cache().write().expect("cache lock");
    if cache.len() > 100_000 {
        cache.clear();
    }
    cache.insert(key, value);
    Ok(value)
}

/// `Phi(x, t) = int G(y) Gamma(x - y, t) dy`.
pub fn generating_phi(x: &[f64], t: f64) -> Result<f64> {
    let n = check_regular(x, t)?;
    if t == 0.0 {
        return laplace_green(x);
    }
    let s = sq(x);
    if n == 3 {
        let a = 0.5 / t.sqrt();
        Ok(a / (2.0 * PI.powf(1.5)) * radial::gauss_moment(0, a * a * s))
    } else {
        phi2(s.sqrt(), t)
    }
}

/// Derivatives `d^m Phi / ds^m`, `m = 1, 2, 3`, with `s = |x|^2`.
fn phi_s_derivatives(n: usize, s: f64, t: f64) -> [f64; 3] {
    if t == 0.0 {
        return if n == 3 {
            let c = 1.0 / (4.0 * PI);
            [-0.5 * c * s.powf(-1.5), 0.75 * c * s.powf(-2.5), -1.875 * c * s.powf(-3.5)]
        } else {
            let c = 1.0 / (4.0 * PI);
            [-c / s, c / (s * s), -2.0 * c / (s * s * s)]
        };
    }
    if n == 3 {
        let a = 0.5 / t.sqrt();
        let y = a * a * s;
        let pre = a / (2.0 * PI.powf(1.5));
        let a2 = a * a;
        [
            -pre * a2 * radial::gauss_moment(1, y),
            pre * a2 * a2 * radial::gauss_moment(2, y),
            -pre * a2 * a2 * a2 * radial::gauss_moment(3, y),
        ]
    } else {
        let y = s / (4.0 * t);
        let pre = -1.0 / (16.0 * PI * t);
        let q = 1.0 / (4.0 * t);
        [
            pre * radial::exp_moment(0, y),
            -pre * q * radial::exp_moment(1, y),
            pre * q * q * radial::exp_moment(2, y),
        ]
    }
}

fn check_indices(n: usize, idx: &[usize]) -> Result<()> {
    if let Some(&i) = idx.iter().find(|&&i| i >= n) {
        return Err(Error::InvalidInput(format!("kernel index {i} out of range for n = {n}")));
    }
    Ok(())
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

fn kij_analytic(i: usize, j: usize, x: &[f64], t: f64) -> f64 {
    let n = x.len();
    let s = sq(x);
    let [h1, h2, _] = phi_s_derivatives(n, s, t);
    // d_i d_j Phi = 2 h' delta_ij + 4 h'' x_i x_j, Delta Phi = 2 n h' + 4 s h''
    let lap = 2.0 * n as f64 * h1 + 4.0 * s * h2;
    -delta(i, j) * lap + 2.0 * h1 * delta(i, j) + 4.0 * h2 * x[i] * x[j]
}

fn kijk_analytic(i: usize, j: usize, k: usize, x: &[f64], t: f64) -> f64 {
    let n = x.len();
    let s = sq(x);
    let [_, h2, h3] = phi_s_derivatives(n, s, t);
    let dlap = 2.0 * x[k] * ((2.0 * n as f64 + 4.0) * h2 + 4.0 * s * h3);
    let third = 4.0 * h2 * (delta(i, j) * x[k] + delta(i, k) * x[j] + delta(j, k) * x[i])
        + 8.0 * h3 * x[i] * x[j] * x[k];
    -delta(i, j) * dlap + third
}

/// Finite-difference step used by [`DerivativeMethod::FiniteDifference`].
pub fn fd_step(x: &[f64], t: f64) -> f64 {
    (1e-3 * (sq(x) + t).sqrt()).max(1e-4)
}

const D1: [(f64, f64); 4] = [(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)];
const D2: [(f64, f64); 5] = [
    (-2.0, -1.0 / 12.0),
    (-1.0, 16.0 / 12.0),
    (0.0, -30.0 / 12.0),
    (1.0, 16.0 / 12.0),
    (2.0, -1.0 / 12.0),
];

fn shifted(x: &[f64], axis: usize, d: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[axis] += d;
    y
}

/// Fourth-order central difference of `f` along `axis`.
fn fd_first(f: &dyn Fn(&[f64]) -> Result<f64>, x: &[f64], axis: usize, h: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (o, w) in D1 {
        acc += w * f(&shifted(x, axis, o * h))?;
    }
    Ok(acc / h)
}

fn fd_second(f: &dyn Fn(&[f64]) -> Result<f64>, x: &[f64], a: usize, b: usize, h: f64) -> Result<f64> {
    if a == b {
        let mut acc = 0.0;
        for (o, w) in D2 {
            acc += w * f(&shifted(x, a, o * h))?;
        }
        Ok(acc / (h * h))
    } else {
        let g = |y: &[f64]| fd_first(f, y, b, h);
        fd_first(&g, x, a, h)
    }
}

fn kij_fd(i: usize, j: usize, x: &[f64], t: f64) -> Result<f64> {
    let h = fd_step(x, t);
    let phi = |y: &[f64]| generating_phi(y, t);
    let mut v = fd_second(&phi, x, i, j, h)?;
    if i == j {
        let mut lap = 0.0;
        for a in 0..x.len() {
            lap += fd_second(&phi, x, a, a, h)?;
        }
        v -= lap;
    }
    Ok(v)
}

fn kijk_fd(i: usize, j: usize, k: usize, x: &[f64], t: f64) -> Result<f64> {
    let h = fd_step(x, t);
    let kij = |y: &[f64]| kij_fd(i, j, y, t);
    fd_first(&kij, x, k, h)
}

/// `K_ij(x, t)`; symmetric in `(i, j)` because both orders share one formula.
pub fn oseen_kij(i: usize, j: usize, x: &[f64], t: f64) -> Result<f64> {
    oseen_kij_with(i, j, x, t, DerivativeMethod::Analytic)
}

pub fn oseen_kij_with(i: usize, j: usize, x: &[f64], t: f64, method: DerivativeMethod) -> Result<f64> {
    let n = check_regular(x, t)?;
    check_indices(n, &[i, j])?;
    let (i, j) = (i.min(j), i.max(j));
    match method {
        DerivativeMethod::Analytic => Ok(kij_analytic(i, j, x, t)),
        DerivativeMethod::FiniteDifference => kij_fd(i, j, x, t),
    }
}

/// `K_ijk(x, t) = d_k K_ij(x, t)`.
pub fn oseen_kijk(i: usize, j: usize, k: usize, x: &[f64], t: f64) -> Result<f64> {
    oseen_kijk_with(i, j, k, x, t, DerivativeMethod::Analytic)
}

pub fn oseen_kijk_with(
    i: usize,
    j: usize,
    k: usize,
    x: &[f64],
    t: f64,
    method: DerivativeMethod,
) -> Result<f64> {
    let n = check_regular(x, t)?;
    check_indices(n, &[i, j, k])?;
    let (i, j) = (i.min(j), i.max(j));
    match method {
        DerivativeMethod::Analytic => Ok(kijk_analytic(i, j, k, x, t)),
        DerivativeMethod::FiniteDifference => kijk_fd(i, j, k, x, t),
    }
}

/// Evaluate a query, attaching an accuracy warning near the singular point.
pub fn evaluate(q: &KernelQuery, method: DerivativeMethod) -> Result<KernelValue> {
    let n = check_point(&q.x)?;
    if q.indices.len() != q.kind.index_count() {
        return Err(Error::InvalidInput(format!(
            "{:?} takes {} indices, got {}",
            q.kind,
            q.kind.index_count(),
            q.indices.len()
        )));
    }
    check_indices(n, &q.indices)?;
    let value = match q.kind {
        KernelKind::Gamma => heat_kernel(&q.x, q.t)?,
        KernelKind::G => laplace_green(&q.x)?,
        KernelKind::Phi => generating_phi(&q.x, q.t)?,
        KernelKind::Kij => oseen_kij_with(q.indices[0], q.indices[1], &q.x, q.t, method)?,
        KernelKind::Kijk => {
            oseen_kijk_with(q.indices[0], q.indices[1], q.indices[2], &q.x, q.t, method)?
        }
    };
    let scale = (sq(&q.x) + q.t).sqrt();
    let derivative_kind = matches!(q.kind, KernelKind::Kij | KernelKind::Kijk);
    let warning = if derivative_kind
        && method == DerivativeMethod::FiniteDifference
        && fd_step(&q.x, q.t) > 1e-2 * scale
    {
        Some(format!(
            "finite-difference step {:e} is not small against the distance {:e} to the singular point",
            fd_step(&q.x, q.t),
            scale
        ))
    } else if scale < 1e-6 {
        Some(format!("near-singular evaluation at distance {scale:e}; relative accuracy degraded"))
    } else {
        None
    };
    Ok(KernelValue { value, warning })
}

#[cfg(test)]
mod tests;
