use serde::Serialize;

use super::solver::ScalarTrajectory;

pub const MAX_PRINCIPLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub step: usize,
    pub node: usize,
    pub value: f64,
    /// The bound that was crossed.
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MaxPrincipleReport {
    pub sup: Vec<f64>,
    pub inf: Vec<f64>,
    pub violations: Vec<Violation>,
    pub tolerance: f64,
}

impl MaxPrincipleReport {
    pub fn violation_count(&self) -> usize {
        self.violations.len()
    }
}

/// Per-level sup/inf and every interior value outside the range of the
/// initial data and the boundary values seen so far.
pub fn max_principle_report(traj: &ScalarTrajectory) -> MaxPrincipleReport {
    let g = traj.grid;
    let first = &traj.values[0];
    let (mut lo, mut hi) = first
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let mut sup = Vec::with_capacity(traj.values.len());
    let mut inf = Vec::with_capacity(traj.values.len());
    let mut violations = Vec::new();
    for (step, level) in traj.values.iter().enumerate() {
        for (i, &v) in level.iter().enumerate() {
            if g.is_boundary(i) {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        for (i, &v) in level.iter().enumerate() {
            if g.is_boundary(i) {
                continue;
            }
            if v > hi + MAX_PRINCIPLE_TOL {
                violations.push(Violation { step, node: i, value: v, bound: hi });
            } else if v < lo - MAX_PRINCIPLE_TOL {
                violations.push(Violation { step, node: i, value: v, bound: lo });
            }
        }
        sup.push(level.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        inf.push(level.iter().cloned().fold(f64::INFINITY, f64::min));
    }
    MaxPrincipleReport {
        sup,
        inf,
        violations,
        tolerance: MAX_PRINCIPLE_TOL,
    }
}
