use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::solver::{parabolic_solve, ParabolicProblem};
use crate::error::{Error, Result};

/// Closed axis-aligned box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Region {
    pub fn new(lower: &[f64], upper: &[f64]) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::Geometry("region bounds have mismatched dimensions".into()));
        }
        if lower.iter().zip(upper).any(|(a, b)| !(a <= b)) {
            return Err(Error::Geometry(format!("empty region {lower:?} .. {upper:?}")));
        }
        Ok(Self {
            lower: lower.to_vec(),
            upper: upper.to_vec(),
        })
    }

    pub fn point(x: &[f64]) -> Self {
        Self {
            lower: x.to_vec(),
            upper: x.to_vec(),
        }
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        let eps = 1e-12;
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (a, b))| *v >= a - eps && *v <= b + eps)
    }

    fn within(&self, other: &Region) -> bool {
        self.lower.iter().zip(&other.lower).all(|(a, b)| a >= b)
            && self.upper.iter().zip(&other.upper).all(|(a, b)| a <= b)
    }

    fn strictly_within(&self, lower: &[f64], upper: &[f64]) -> bool {
        self.lower.iter().zip(lower).all(|(a, b)| a > b) && self.upper.iter().zip(upper).all(|(a, b)| a < b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnackProbe {
    pub k_set: Region,
    pub omega_prime: Region,
    pub tau: f64,
    pub deltas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOptions {
    pub nodes: usize,
    /// `None` selects `horizon / 400`.
    pub dt: Option<f64>,
    /// Boundary windows as fractions of the horizon: boundary data is 1 on
    /// `[T (1 - w), T]` and 0 before.
    pub windows: Vec<f64>,
    /// Constant initial levels.
    pub levels: Vec<f64>,
    pub jobs: Option<usize>,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            nodes: 81,
            dt: None,
            windows: vec![1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125],
            levels: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            jobs: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeFamily {
    /// Boundary windows times initial levels.
    Window,
    /// The single member `u = 1`.
    Constant,
}

impl ProbeFamily {
    pub fn label(self) -> &'static str {
        match self {
            ProbeFamily::Window => "window",
            ProbeFamily::Constant => "constant",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MemberResult {
    pub window: f64,
    pub level: f64,
    /// `sup_K u(., T)`.
    pub sup_k: f64,
    /// `min u` over `Omega' x (tau, T]`.
    pub interior_min: f64,
    pub max_principle_violations: usize,
    pub drift_sup: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsilonRow {
    pub family: ProbeFamily,
    pub delta: f64,
    /// Worst deficit `1 - min u` over members with `sup_K u(T) >= 1 - delta`.
    pub epsilon: f64,
    pub qualifying: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct HarnackTable {
    pub rows: Vec<EpsilonRow>,
    pub members: Vec<MemberResult>,
    pub drift_sup: f64,
}

impl HarnackTable {
    pub fn epsilons(&self, family: ProbeFamily) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.family == family)
            .map(|r| (r.delta, r.epsilon))
            .collect()
    }

    /// Whether epsilon is non-decreasing in delta within each family.
    pub fn is_monotone(&self) -> bool {
        [ProbeFamily::Window, ProbeFamily::Constant].iter().all(|&f| {
            let mut e = self.epsilons(f);
            e.sort_by(|a, b| a.0.total_cmp(&b.0));
            e.windows(2).all(|w| w[1].1 >= w[0].1)
        })
    }
}

fn check_geometry(p: &ParabolicProblem, probe: &HarnackProbe) -> Result<()> {
    let dim = p.lower.len();
    if probe.k_set.lower.len() != dim || probe.omega_prime.lower.len() != dim {
        return Err(Error::Geometry("probe regions and domain differ in dimension".into()));
    }
    if !probe.k_set.within(&probe.omega_prime) {
        return Err(Error::Geometry("K is not contained in Omega'".into()));
    }
    if !probe.omega_prime.strictly_within(&p.lower, &p.upper) {
        return Err(Error::Geometry("closure of Omega' is not inside the domain".into()));
    }
    if !(probe.tau > 0.0 && probe.tau < p.horizon) {
        return Err(Error::Geometry(format!(
            "need 0 < tau < T, got tau = {}, T = {}",
            probe.tau, p.horizon
        )));
    }
    if probe.deltas.is_empty() || probe.deltas.iter().any(|d| !(*d >= 0.0 && *d <= 1.0)) {
        return Err(Error::InvalidInput("deltas must be a non-empty list in [0, 1]".into()));
    }
    Ok(())
}

fn run_member(
    p: &ParabolicProblem,
    probe: &HarnackProbe,
    opts: &ProbeOptions,
    window: f64,
    level: f64,
) -> Result<MemberResult> {
    let horizon = p.horizon;
    let start = horizon * (1.0 - window);
    let member = p
        .clone()
        .with_initial(move |_| level)
        .with_boundary(move |_, t| if t >= start - 1e-12 * horizon { 1.0 } else { 0.0 });
    let traj = parabolic_solve(&member, opts.nodes, opts.dt.unwrap_or(horizon / 400.0))?;
    let g = traj.grid;
    let k_nodes: Vec<usize> = (0..g.len()).filter(|&i| probe.k_set.contains_point(&g.point(i))).collect();
    if k_nodes.is_empty() {
        return Err(Error::Geometry("K contains no grid node; refine the grid".into()));
    }
    let inner: Vec<usize> = (0..g.len())
        .filter(|&i| probe.omega_prime.contains_point(&g.point(i)))
        .collect();
    let last = traj.last();
    let sup_k = k_nodes.iter().map(|&i| last[i]).fold(f64::NEG_INFINITY, f64::max);
    let mut interior_min = f64::INFINITY;
    for (t, level) in traj.times.iter().zip(&traj.values) {
        if *t > probe.tau {
            for &i in &inner {
                interior_min = interior_min.min(level[i]);
            }
        }
    }
    let violations = super::report::max_principle_report(&traj).violation_count();
    Ok(MemberResult {
        window,
        level,
        sup_k,
        interior_min,
        max_principle_violations: violations,
        drift_sup: traj.drift_sup,
    })
}

fn epsilon_for(members: &[&MemberResult], delta: f64) -> (f64, usize) {
    let q: Vec<_> = members.iter().filter(|m| m.sup_k >= 1.0 - delta - 1e-12).collect();
    let eps = q.iter().map(|m| 1.0 - m.interior_min).fold(0.0, f64::max);
    (eps, q.len())
}

/// Worker count: the explicit request or rayon's default, capped by
/// `FLOWLAB_THREADS` when that is set to a positive integer.
pub fn worker_count(jobs: Option<usize>) -> usize {
    let cap = std::env::var("FLOWLAB_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()).filter(|&n| n > 0);
    let want = jobs.filter(|&n| n > 0).unwrap_or_else(rayon::current_num_threads);
    cap.map_or(want, |c| want.min(c)).max(1)
}

/// Empirical `epsilon(delta)` table over the documented data family.
///
/// Only the domain, horizon and drift of `p` are used; initial and boundary
/// data come from the family. Members run in parallel and the table is
/// assembled in `delta` order.
pub fn harnack_stability_probe(
    p: &ParabolicProblem,
    probe: &HarnackProbe,
    opts: &ProbeOptions,
) -> Result<HarnackTable> {
    check_geometry(p, probe)?;
    let mut specs: Vec<(f64, f64)> = Vec::new();
    for &w in &opts.windows {
        for &c in &opts.levels {
            specs.push((w, c));
        }
    }
    if !specs.contains(&(1.0, 1.0)) {
        specs.push((1.0, 1.0));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(opts.jobs))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let shared = Arc::new(p.clone());
    let members: Vec<MemberResult> = pool.install(|| {
        specs
            .par_iter()
            .map(|&(w, c)| run_member(&shared, probe, opts, w, c))
            .collect::<Result<Vec<_>>>()
    })?;
    let drift_sup = members.iter().map(|m| m.drift_sup).fold(0.0, f64::max);
    let mut deltas = probe.deltas.clone();
    deltas.sort_by(|a, b| a.total_cmp(b));
    let all: Vec<&MemberResult> = members.iter().collect();
    let constant: Vec<&MemberResult> = members.iter().filter(|m| m.window == 1.0 && m.level == 1.0).collect();
    let mut rows = Vec::new();
    for (family, set) in [(ProbeFamily::Window, &all), (ProbeFamily::Constant, &constant)] {
        for &delta in &deltas {
            let (epsilon, qualifying) = epsilon_for(set, delta);
            rows.push(EpsilonRow {
                family,
                delta,
                epsilon,
                qualifying,
            });
        }
    }
    Ok(HarnackTable {
        rows,
        members,
        drift_sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heat_probe() -> (ParabolicProblem, HarnackProbe) {
        let p = ParabolicProblem::constant(&[-1.0], &[1.0], 1.0, 0.0);
        let probe = HarnackProbe {
            k_set: Region::point(&[0.0]),
            omega_prime: Region::new(&[-0.5], &[0.5]).unwrap(),
            tau: 0.5,
            deltas: vec![0.5, 0.2, 0.1, 0.05],
        };
        (p, probe)
    }

    fn small_opts() -> ProbeOptions {
        ProbeOptions {
            nodes: 41,
            ..ProbeOptions::default()
        }
    }

    #[test]
    fn heat_table_is_monotone_and_constant_row_vanishes() {
        let (p, probe) = heat_probe();
        let t = harnack_stability_probe(&p, &probe, &small_opts()).unwrap();
        assert!(t.is_monotone());
        for (_, e) in t.epsilons(ProbeFamily::Constant) {
            assert_eq!(e, 0.0);
        }
        assert!(t.members.iter().all(|m| m.max_principle_violations == 0));
        let w = t.epsilons(ProbeFamily::Window);
        assert!(w.last().unwrap().1 > w.first().unwrap().1);
    }

    #[test]
    fn thread_count_does_not_change_the_table() {
        let (p, probe) = heat_probe();
        let a = harnack_stability_probe(&p, &probe, &ProbeOptions { jobs: Some(1), ..small_opts() }).unwrap();
        let b = harnack_stability_probe(&p, &probe, &ProbeOptions { jobs: Some(3), ..small_opts() }).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn drift_sweep_is_recorded() {
        let (p, probe) = heat_probe();
        let drifted = p.clone().with_drift(|_, _| [1.0, 0.0]);
        let t = harnack_stability_probe(&drifted, &probe, &small_opts()).unwrap();
        assert!((t.drift_sup - 1.0).abs() < 1e-15);
        assert!(t.is_monotone());
    }

    #[test]
    fn bad_geometry_rejected() {
        let (p, mut probe) = heat_probe();
        probe.k_set = Region::point(&[0.8]);
        assert!(matches!(harnack_stability_probe(&p, &probe, &small_opts()), Err(Error::Geometry(_))));
        let (p, mut probe) = heat_probe();
        probe.omega_prime = Region::new(&[-1.0], &[0.5]).unwrap();
        assert!(matches!(harnack_stability_probe(&p, &probe, &small_opts()), Err(Error::Geometry(_))));
        let (p, mut probe) = heat_probe();
        probe.tau = 1.0;
        assert!(matches!(harnack_stability_probe(&p, &probe, &small_opts()), Err(Error::Geometry(_))));
    }
}
