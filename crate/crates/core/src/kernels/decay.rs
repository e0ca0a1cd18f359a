//! Decay-law fit: max of |kernel| over the parabolic sphere `|x|^2 + t = s^2`
//! against `s`, fitted on a log-log scale.

use serde::Serialize;

use super::{evaluate, DerivativeMethod, KernelKind, KernelQuery};
use crate::error::{Error, Result};

pub const MIN_SCALES: usize = 20;
const ANGLES: usize = 16;

#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub kind: KernelKind,
    pub dim: usize,
    pub scales: Vec<f64>,
    pub max_abs: Vec<f64>,
    /// `max_abs * s^p` with `p` the expected decay exponent.
    pub bound_ratio: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square deviation of `ln max_abs` from the fitted line.
    pub residual: f64,
    pub expected_slope: f64,
}

fn directions(n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    if n == 2 {
        for k in 0..16 {
            let a = k as f64 * std::f64::consts::PI / 8.0;
            out.push(vec![a.cos(), a.sin()]);
        }
    } else {
        for a in -1i32..=1 {
            for b in -1i32..=1 {
                for c in -1i32..=1 {
                    if a == 0 && b == 0 && c == 0 {
                        continue;
                    }
                    let norm = ((a * a + b * b + c * c) as f64).sqrt();
                    out.push(vec![a as f64 / norm, b as f64 / norm, c as f64 / norm]);
                }
            }
        }
        let norm = 14f64.sqrt();
        out.push(vec![1.0 / norm, 2.0 / norm, 3.0 / norm]);
    }
    out
}

/// Sample points `(x, t)` on `|x|^2 + t = s^2`. The same relative pattern is
/// used at every scale. With `include_axis` the point `x = 0, t = s^2` is
/// part of the set.
pub fn sphere_samples(n: usize, s: f64, include_axis: bool) -> Vec<(Vec<f64>, f64)> {
    let mut pts = Vec::new();
    if include_axis {
        pts.push((vec![0.0; n], s * s));
    }
    let dirs = directions(n);
    for j in 1..ANGLES {
        let alpha = j as f64 / ANGLES as f64 * std::f64::consts::FRAC_PI_2;
        let (r, t) = (s * alpha.sin(), (s * alpha.cos()).powi(2));
        for d in &dirs {
            pts.push((d.iter().map(|c| c * r).collect(), t));
        }
    }
    pts
}

fn index_sets(kind: KernelKind, n: usize) -> Vec<Vec<usize>> {
    match kind.index_count() {
        0 => vec![vec![]],
        2 => (0..n).flat_map(|i| (i..n).map(move |j| vec![i, j])).collect(),
        _ => (0..n)
            .flat_map(|i| (i..n).flat_map(move |j| (0..n).map(move |k| vec![i, j, k])))
            .collect(),
    }
}

pub fn verify_decay(kind: KernelKind, n: usize, scales: &[f64]) -> Result<DecayFit> {
    if n != 2 && n != 3 {
        return Err(Error::Dimension(format!("decay fit needs n = 2 or 3, got {n}")));
    }
    if scales.len() < MIN_SCALES {
        return Err(Error::Fit(format!(
            "decay fit needs at least {MIN_SCALES} scales, got {}",
            scales.len()
        )));
    }
    if scales.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::Fit("scales must be positive and finite".into()));
    }
    let lo = scales.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = scales.iter().cloned().fold(0.0, f64::max);
    if hi <= lo * (1.0 + 1e-12) {
        return Err(Error::Fit("scales span no range".into()));
    }
    let p = kind.decay_exponent(n);
    let sets = index_sets(kind, n);
    let mut max_abs = Vec::with_capacity(scales.len());
    for &s in scales {
        let mut m: f64 = 0.0;
        for (x, t) in sphere_samples(n, s, kind != KernelKind::G) {
            for idx in &sets {
                let q = KernelQuery { kind, indices: idx.clone(), x: x.clone(), t };
                m = m.max(evaluate(&q, DerivativeMethod::Analytic)?.value.abs());
            }
        }
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::Fit(format!("max |kernel| at scale {s} is {m}")));
        }
        max_abs.push(m);
    }
    let xs: Vec<f64> = scales.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = max_abs.iter().map(|m| m.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    let bound_ratio = scales.iter().zip(&max_abs).map(|(s, m)| m * s.powf(p)).collect();
    Ok(DecayFit {
        kind,
        dim: n,
        scales: scales.to_vec(),
        max_abs,
        bound_ratio,
        slope,
        intercept,
        residual,
        expected_slope: -p,
    })
}

/// `count` logarithmically spaced scales from `lo` to `hi` inclusive.
pub fn log_scales(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
