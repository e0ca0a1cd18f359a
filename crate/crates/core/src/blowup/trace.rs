use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mild::Trajectory;

/// Sup-norm history `h(t)` and its running maximum `H(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupTrace {
    pub times: Vec<f64>,
    pub h: Vec<f64>,
    pub running_max: Vec<f64>,
    pub t_candidate: Option<f64>,
}

impl BlowupTrace {
    /// Wrap a measured or synthetic series.
    pub fn from_series(times: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        if times.len() != h.len() {
            return Err(Error::Shape(format!("{} times but {} sup values", times.len(), h.len())));
        }
        if times.is_empty() {
            return Err(Error::Data("empty trace".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("trace times must increase strictly".into()));
        }
        if let Some(v) = h.iter().chain(&times).find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite trace value {v}")));
        }
        if let Some(v) = h.iter().find(|v| **v < 0.0) {
            return Err(Error::InvalidInput(format!("sup values are non-negative, got {v}")));
        }
        let mut running_max = Vec::with_capacity(h.len());
        let mut m = f64::NEG_INFINITY;
        for &v in &h {
            m = m.max(v);
            running_max.push(m);
        }
        Ok(Self {
            times,
            h,
            running_max,
            t_candidate: None,
        })
    }

    pub fn with_candidate(mut self, t: f64) -> Result<Self> {
        check_before(&self.times, t)?;
        self.t_candidate = Some(t);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn check_before(times: &[f64], t: f64) -> Result<()> {
    match times.last() {
        Some(&last) if last < t => Ok(()),
        Some(&last) => Err(Error::Domain(format!("recorded times reach {last}, not below T = {t}"))),
        None => Err(Error::Data("empty trace".into())),
    }
}

/// `h(t) = sup_x |u(x, t)|` over grid nodes for every snapshot.
pub fn trace_from(traj: &Trajectory) -> Result<BlowupTrace> {
    if traj.fields.is_empty() {
        return Err(Error::Data("trajectory has no snapshots".into()));
    }
    let times = traj.fields.iter().map(|f| f.time).collect();
    let h = traj.fields.iter().map(|f| f.sup_norm()).collect();
    BlowupTrace::from_series(times, h)
}

/// Fraction of the largest `h sqrt(T - t)` below which the last value marks
/// the trace as inconsistent with a Leray-rate blow-up at `T`.
pub const LERAY_FLAG_RATIO: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LerayRate {
    /// `inf_t h(t) sqrt(T - t)` over recorded times.
    pub infimum: f64,
    pub at_time: f64,
    pub product_last: f64,
    pub product_max: f64,
    /// The product has collapsed towards `T`: no Leray-consistent blow-up.
    pub no_leray_blowup: bool,
}

pub fn leray_rate(trace: &BlowupTrace, blowup_time: f64) -> Result<LerayRate> {
    check_before(&trace.times, blowup_time)?;
    let prod: Vec<f64> = trace
        .times
        .iter()
        .zip(&trace.h)
        .map(|(t, h)| h * (blowup_time - t).sqrt())
        .collect();
    let (k, infimum) = prod
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |b, (k, &v)| if v < b.1 { (k, v) } else { b });
    let product_max = prod.iter().cloned().fold(0.0, f64::max);
    let product_last = *prod.last().unwrap_or(&0.0);
    Ok(LerayRate {
        infimum,
        at_time: trace.times[k],
        product_last,
        product_max,
        no_leray_blowup: product_last < LERAY_FLAG_RATIO * product_max,
    })
}

pub const DEFAULT_WINDOW: usize = 16;
pub const MIN_WINDOW: usize = 8;
pub const SLOPE_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum BlowupType {
    NoBlowup,
    TypeI { c_fit: f64 },
    TypeII,
}

impl BlowupType {
    pub fn label(&self) -> &'static str {
        match self {
            BlowupType::NoBlowup => "NoBlowup",
            BlowupType::TypeI { .. } => "TypeI",
            BlowupType::TypeII => "TypeII",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: BlowupType,
    pub slope: f64,
    pub intercept: f64,
    pub window: usize,
    /// `sup h sqrt(T - t)` over the window.
    pub rate_sup: f64,
}

/// Least-squares slope of `log h` against `-log(T - t)` over the last
/// `window` samples. Slopes up to `SLOPE_TOL` count as bounded, up to
/// `1/2 + SLOPE_TOL` as Type I, anything steeper as Type II.
pub fn classify(trace: &BlowupTrace, blowup_time: f64, window: usize) -> Result<Classification> {
    check_before(&trace.times, blowup_time)?;
    if window < MIN_WINDOW {
        return Err(Error::Fit(format!("window of {window} samples, need at least {MIN_WINDOW}")));
    }
    if trace.len() < window {
        return Err(Error::Fit(format!("trace has {} samples, window needs {window}", trace.len())));
    }
    let start = trace.len() - window;
    let xs: Vec<f64> = trace.times[start..].iter().map(|t| -(blowup_time - t).ln()).collect();
    let mut ys = Vec::with_capacity(window);
    for &h in &trace.h[start..] {
        if !(h > 0.0) {
            return Err(Error::Fit("sup values in the window must be positive".into()));
        }
        ys.push(h.ln());
    }
    let n = window as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("window times are degenerate".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rate_sup = trace.times[start..]
        .iter()
        .zip(&trace.h[start..])
        .map(|(t, h)| h * (blowup_time - t).sqrt())
        .fold(0.0, f64::max);
    let kind = if slope <= SLOPE_TOL {
        BlowupType::NoBlowup
    } else if slope <= 0.5 + SLOPE_TOL {
        BlowupType::TypeI { c_fit: rate_sup }
    } else {
        BlowupType::TypeII
    };
    Ok(Classification {
        kind,
        slope,
        intercept,
        window,
        rate_sup,
    })
}

/// `(int ||u(t)||_p^q dt)^{1/q}` by the trapezoid rule, with the
/// Ladyzhenskaya-Prodi-Serrin index `n/p + 2/q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SerrinNorm {
    pub p: f64,
    pub q: f64,
    pub index: f64,
    pub norm: f64,
}

pub fn serrin_norm(traj: &Trajectory, p: f64, q: f64) -> Result<SerrinNorm> {
    if !(p >= 1.0 && q >= 1.0) {
        return Err(Error::InvalidInput(format!("need p, q >= 1, got p = {p}, q = {q}")));
    }
    if traj.len() < 2 {
        return Err(Error::Data("need at least two snapshots".into()));
    }
    let vals: Vec<(f64, f64)> = traj
        .fields
        .iter()
        .map(|f| (f.time, if p.is_infinite() { f.sup_norm() } else { f.lp_norm(p) }.powf(q)))
        .collect();
    let integral: f64 = vals.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();
    let n = traj.grid().dim() as f64;
    Ok(SerrinNorm {
        p,
        q,
        index: n / p + 2.0 / q,
        norm: integral.powf(1.0 / q),
    })
}
