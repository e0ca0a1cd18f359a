use serde::{Deserialize, Serialize};

use crate::mild::Trajectory;

use super::source::BoxTrajectory;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monitor {
    Series(Vec<f64>),
    NotApplicable(String),
}

impl Monitor {
    pub fn series(&self) -> Option<&[f64]> {
        match self {
            Monitor::Series(v) => Some(v),
            Monitor::NotApplicable(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleInvariantReport {
    pub times: Vec<f64>,
    /// `sup rho |u|`, `rho` the distance to the `x_3` axis.
    pub sup_rho_u: Monitor,
    /// `sup sqrt(T - t) |u|`.
    pub sup_sqrt_u: Monitor,
}

fn rate_monitor(times: &[f64], sups: &[f64], blowup_time: Option<f64>) -> Monitor {
    match blowup_time {
        None => Monitor::NotApplicable("no blow-up time given".into()),
        Some(t) if times.iter().any(|s| *s >= t) => {
            Monitor::NotApplicable(format!("recorded times reach T = {t}"))
        }
        Some(t) => Monitor::Series(times.iter().zip(sups).map(|(s, h)| (t - s).sqrt() * h).collect()),
    }
}

fn planar() -> Monitor {
    Monitor::NotApplicable("cylindrical radius needs three dimensions".into())
}

/// Monitors on a sampled box; `rho` is measured from the box's own `x_3`
/// axis (the line through the origin of its coordinates).
pub fn scale_invariant_monitors(b: &BoxTrajectory, blowup_time: Option<f64>) -> ScaleInvariantReport {
    let nt = b.times.len();
    let sups: Vec<f64> = (0..nt).map(|t| (0..b.len()).fold(0.0f64, |m, k| m.max(b.magnitude(t, k)))).collect();
    let sup_rho_u = if b.dim == 3 {
        let pts: Vec<f64> = (0..b.len()).map(|k| {
            let p = b.point(k);
            p[0].hypot(p[1])
        }).collect();
        Monitor::Series(
            (0..nt)
                .map(|t| pts.iter().enumerate().fold(0.0, |m: f64, (k, r)| m.max(r * b.magnitude(t, k))))
                .collect(),
        )
    } else {
        planar()
    };
    ScaleInvariantReport {
        times: b.times.clone(),
        sup_rho_u,
        sup_sqrt_u: rate_monitor(&b.times, &sups, blowup_time),
    }
}

/// Monitors on a torus trajectory; in three dimensions `rho` is measured
/// from the vertical line through `axis`.
pub fn trajectory_monitors(traj: &Trajectory, axis: [f64; 2], blowup_time: Option<f64>) -> ScaleInvariantReport {
    let g = traj.grid();
    let times: Vec<f64> = traj.fields.iter().map(|f| f.time).collect();
    let sups: Vec<f64> = traj.fields.iter().map(|f| f.sup_norm()).collect();
    let sup_rho_u = if g.dim() == 3 {
        Monitor::Series(
            traj.fields
                .iter()
                .map(|f| {
                    (0..g.len()).fold(0.0, |m: f64, k| {
                        let x = g.coords(k);
                        m.max((x[0] - axis[0]).hypot(x[1] - axis[1]) * f.magnitude_at(k))
                    })
                })
                .collect(),
        )
    } else {
        planar()
    };
    ScaleInvariantReport {
        times,
        sup_rho_u,
        sup_sqrt_u: rate_monitor(&traj.fields.iter().map(|f| f.time).collect::<Vec<_>>(), &sups, blowup_time),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::rescale::{rescale, RescaleStep, RescaleWindow};
    use crate::blowup::source::{capped_swirl, FnSource, VelocitySource};
    use crate::fields::{taylor_green, TorusGrid};
    use crate::mild::heat_trajectory;

    fn swirl_source() -> FnSource {
        // capped swirl decaying in time, plus an axial jet
        FnSource::new(3, (0.0, 1.0), |x, t| {
            let mut v = capped_swirl(x);
            let d = (-t).exp();
            v.iter_mut().for_each(|c| *c *= d);
            v[2] = 0.3 * d / (1.0 + x[0] * x[0] + x[1] * x[1]);
            v
        })
    }

    #[test]
    fn capped_profile_reaches_one() {
        let src = FnSource::new(3, (0.0, 1.0), |x, _| capped_swirl(x));
        let b = BoxTrajectory::sample(&src, vec![0.0; 3], 3.0, 31, vec![0.0]).unwrap();
        let rep = scale_invariant_monitors(&b, None);
        let s = rep.sup_rho_u.series().unwrap();
        assert!((s[0] - 1.0).abs() < 1e-12);
        for k in 0..b.len() {
            let p = b.point(k);
            let r = p[0].hypot(p[1]);
            let f = r * b.magnitude(0, k);
            if r >= 1.0 {
                assert!((f - 1.0).abs() < 1e-12);
            } else {
                assert!(f <= 1.0 + 1e-12);
            }
        }
        assert!(matches!(rep.sup_sqrt_u, Monitor::NotApplicable(_)));
    }

    #[test]
    fn monitors_invariant_under_rescale() {
        let src = swirl_source();
        let x_k = vec![0.0, 0.0, 0.2];
        let s = RescaleStep::normalized(&src, x_k.clone(), 0.9, 2.0).unwrap();
        let s = RescaleStep { m_k: 3.0, ..s };
        let w = RescaleWindow {
            half_width: 4.5,
            depth: 0.9,
            nodes: 19,
            time_samples: 4,
        };
        let scaled = rescale(&src, &s, &w).unwrap();
        let unit = rescale(&src, &RescaleStep { m_k: 1.0, ..s.clone() }, &w.physical(3.0)).unwrap();
        let t_blow = 1.2;
        let a = scale_invariant_monitors(&scaled.traj, Some(s.rescaled_time(t_blow)));
        let b = scale_invariant_monitors(&unit.traj, Some(t_blow - s.t_k));
        for (p, q) in a.sup_rho_u.series().unwrap().iter().zip(b.sup_rho_u.series().unwrap()) {
            assert!((p - q).abs() < 1e-3, "{p} {q}");
        }
        for (p, q) in a.sup_sqrt_u.series().unwrap().iter().zip(b.sup_sqrt_u.series().unwrap()) {
            assert!((p - q).abs() < 1e-3);
        }
        let _ = src.velocity(&x_k, 0.0);
    }

    #[test]
    fn planar_flow_has_no_cylindrical_monitor() {
        let g = TorusGrid::square(16).unwrap();
        let traj = heat_trajectory(&taylor_green(g, 1.0, 0.0).unwrap(), 0.5, 0.1).unwrap();
        let rep = trajectory_monitors(&traj, [0.0, 0.0], Some(1.0));
        assert!(matches!(rep.sup_rho_u, Monitor::NotApplicable(_)));
        let s = rep.sup_sqrt_u.series().unwrap();
        assert!((s[0] - 1.0).abs() < 1e-12);
    }
}
