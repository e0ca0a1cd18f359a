use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fields::{Spectral, TorusGrid, VectorField};

/// Time-ordered snapshots on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub fields: Vec<VectorField>,
    pub dt: f64,
    pub scheme: String,
    pub tolerances: BTreeMap<String, f64>,
}

impl Trajectory {
    pub fn new(fields: Vec<VectorField>, dt: f64, scheme: impl Into<String>) -> Result<Self> {
        let t = Self {
            fields,
            dt,
            scheme: scheme.into(),
            tolerances: BTreeMap::new(),
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let first = self
            .fields
            .first()
            .ok_or_else(|| Error::Data("trajectory has no snapshots".into()))?;
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidInput(format!("time step must be positive, got {}", self.dt)));
        }
        for w in self.fields.windows(2) {
            if w[1].grid != first.grid {
                return Err(Error::Shape("snapshots live on different grids".into()));
            }
            if !(w[1].time > w[0].time) {
                return Err(Error::InvalidInput(format!(
                    "snapshot times not strictly increasing: {} then {}",
                    w[0].time, w[1].time
                )));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> TorusGrid {
        self.fields[0].grid
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.fields.iter().map(|f| f.time).collect()
    }

    pub fn final_time(&self) -> f64 {
        self.fields.last().map_or(0.0, |f| f.time)
    }

    /// Sup over snapshots of the pointwise sup norm.
    pub fn sup_norm(&self) -> f64 {
        self.fields.iter().map(|f| f.sup_norm()).fold(0.0, f64::max)
    }

    /// Sup over snapshots of `|self - other|`; trajectories must match.
    pub fn sup_distance(&self, other: &Trajectory) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .fields
            .iter()
            .zip(&other.fields)
            .map(|(a, b)| a.sup_distance(b))
            .fold(0.0, f64::max))
    }

    pub fn check_compatible(&self, other: &Trajectory) -> Result<()> {
        if self.len() != other.len() || self.grid() != other.grid() {
            return Err(Error::Shape(format!(
                "trajectories differ: {} vs {} snapshots",
                self.len(),
                other.len()
            )));
        }
        let scale = self.final_time().abs().max(1.0);
        for (a, b) in self.fields.iter().zip(&other.fields) {
            if (a.time - b.time).abs() > 1e-12 * scale {
                return Err(Error::Shape(format!(
                    "snapshot times differ: {} vs {}",
                    a.time, b.time
                )));
            }
        }
        Ok(())
    }

    /// Same times and grid, zero fields.
    pub fn zeros_like(&self) -> Trajectory {
        Trajectory {
            fields: self
                .fields
                .iter()
                .map(|f| VectorField::zeros(f.grid, f.time))
                .collect(),
            dt: self.dt,
            scheme: self.scheme.clone(),
            tolerances: BTreeMap::new(),
        }
    }
}

/// `S(t) u0`, the heat extension.
pub fn heat_extend(u0: &VectorField, t: f64) -> Result<VectorField> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("heat extension needs t >= 0, got {t}")));
    }
    u0.validate()?;
    let sp = Spectral::new(u0.grid);
    let mut spec = sp.forward_vector(u0);
    for s in spec.iter_mut() {
        sp.heat_in_place(s, t);
    }
    Ok(sp.inverse_vector(&spec, u0.time + t))
}

/// Step count and adjusted step so that `steps * dt = horizon` exactly.
pub(crate) fn uniform_steps(horizon: f64, dt: f64) -> Result<(usize, f64)> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::Domain(format!("final time must be positive, got {horizon}")));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
    }
    let steps = ((horizon / dt) - 1e-9).ceil().max(1.0) as usize;
    Ok((steps, horizon / steps as f64))
}

/// Heat extension sampled at `t = 0, dt, ..., horizon` (step adjusted so the
/// horizon is hit exactly).
pub fn heat_trajectory(u0: &VectorField, horizon: f64, dt: f64) -> Result<Trajectory> {
    u0.validate()?;
    let (steps, dt) = uniform_steps(horizon, dt)?;
    let sp = Spectral::new(u0.grid);
    let base = sp.forward_vector(u0);
    let fields = (0..=steps)
        .map(|n| {
            let t = n as f64 * dt;
            let mut spec = base.clone();
            for s in spec.iter_mut() {
                sp.heat_in_place(s, t);
            }
            let mut f = sp.inverse_vector(&spec, t);
            if n == 0 {
                f.components.clone_from(&u0.components);
            }
            f
        })
        .collect();
    Trajectory::new(fields, dt, "heat")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::taylor_green;
    use crate::mild::datum::random_band;

    #[test]
    fn constant_is_fixed() {
        let g = TorusGrid::square(8).unwrap();
        let c = VectorField::from_fn(g, 0.0, |_| [0.3, -1.2, 0.0]);
        let h = heat_extend(&c, 2.5).unwrap();
        assert!(h.sup_distance(&c) < 1e-15);
    }

    #[test]
    fn taylor_green_decays_on_single_shell() {
        let g = TorusGrid::square(16).unwrap();
        let tg = taylor_green(g, 1.0, 0.0).unwrap();
        for t in [0.1, 0.5, 1.0] {
            let h = heat_extend(&tg, t).unwrap();
            assert!(h.sup_distance(&tg.scaled((-2.0 * t).exp())) < 1e-14);
        }
    }

    #[test]
    fn negative_time_rejected() {
        let g = TorusGrid::square(8).unwrap();
        let z = VectorField::zeros(g, 0.0);
        assert!(matches!(heat_extend(&z, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn sup_norm_non_increasing() {
        let g = TorusGrid::square(32).unwrap();
        for seed in 0..4 {
            let u0 = random_band(g, seed, 1.0, 6.0).unwrap();
            let traj = heat_trajectory(&u0, 0.5, 0.05).unwrap();
            for w in traj.fields.windows(2) {
                assert!(w[1].sup_norm() <= w[0].sup_norm() + 1e-12);
            }
        }
    }

    #[test]
    fn trajectory_validation() {
        let g = TorusGrid::square(8).unwrap();
        let a = VectorField::zeros(g, 0.0);
        let b = VectorField::zeros(g, 0.0);
        assert!(Trajectory::new(vec![a.clone(), b], 0.1, "x").is_err());
        assert!(Trajectory::new(vec![], 0.1, "x").is_err());
        let c = VectorField::zeros(TorusGrid::square(16).unwrap(), 1.0);
        assert!(matches!(Trajectory::new(vec![a, c], 0.1, "x"), Err(Error::Shape(_))));
    }

    #[test]
    fn step_adjustment_hits_horizon() {
        let (n, dt) = uniform_steps(1.0, 0.3).unwrap();
        assert_eq!(n, 4);
        assert!((dt - 0.25).abs() < 1e-15);
        let (n, _) = uniform_steps(1.0, 1.0 / 128.0).unwrap();
        assert_eq!(n, 128);
    }
}
