use crate::error::{Error, Result};
use crate::fields::{AxisymGrid, AxisymScalar, Parity};

use super::ops::{ImplicitSolver, RadialOperator};
use super::state::{solve_stream, SwirlState};

/// Advective Courant number `dt max(|u_r|/dr + |u_z|/dz)`.
pub fn courant(g: &AxisymGrid, u_r: &[f64], u_z: &[f64], dt: f64) -> f64 {
    let (dr, dz) = (g.dr(), g.dz());
    u_r.iter()
        .zip(u_z)
        .fold(0.0f64, |m, (a, b)| m.max(dt * (a.abs() / dr + b.abs() / dz)))
}

fn check_cfl(g: &AxisymGrid, u_r: &[f64], u_z: &[f64], dt: f64) -> Result<f64> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
    }
    let c = courant(g, u_r, u_z, dt);
    if c > 1.0 {
        return Err(Error::Cfl(format!("Courant number {c:.4} exceeds 1 at dt = {dt:e}")));
    }
    Ok(c)
}

/// Explicit first-order upwind transport `s - dt (u_r s_r + u_z s_z)` at
/// nodes off the outer boundary; a convex combination when the Courant
/// number is at most one.
fn upwind(g: &AxisymGrid, s: &[f64], u_r: &[f64], u_z: &[f64], dt: f64) -> Vec<f64> {
    let (nr, dr, dz) = (g.nr(), g.dr(), g.dz());
    let mut out = s.to_vec();
    for j in 1..g.nz() - 1 {
        for i in 0..nr - 1 {
            let k = g.idx(i, j);
            let a = u_r[k];
            let sr = if a > 0.0 && i > 0 {
                (s[k] - s[k - 1]) / dr
            } else if a < 0.0 {
                (s[k + 1] - s[k]) / dr
            } else {
                0.0
            };
            let b = u_z[k];
            let sz = if b > 0.0 {
                (s[k] - s[k - nr]) / dz
            } else {
                (s[k + nr] - s[k]) / dz
            };
            out[k] = s[k] - dt * (a * sr + b * sz);
        }
    }
    out
}

/// `d_z(q^2)` with `q = f / r^2`; on the axis `q` is the parity limit
/// `(16 f_1 - f_2) / (12 dr^2)`.
pub fn swirl_source(g: &AxisymGrid, f: &[f64]) -> Vec<f64> {
    let (nr, dr, dz) = (g.nr(), g.dr(), g.dz());
    let mut q2 = vec![0.0; g.len()];
    for j in 0..g.nz() {
        let k0 = g.idx(0, j);
        let q0 = (16.0 * f[k0 + 1] - f[k0 + 2]) / (12.0 * dr * dr);
        q2[k0] = q0 * q0;
        for i in 1..nr {
            let q = f[k0 + i] / g.r(i).powi(2);
            q2[k0 + i] = q * q;
        }
    }
    let mut out = vec![0.0; g.len()];
    for j in 1..g.nz() - 1 {
        for i in 0..nr - 1 {
            let k = g.idx(i, j);
            out[k] = (q2[k + nr] - q2[k - nr]) / (2.0 * dz);
        }
    }
    out
}

/// Cached implicit factorizations for a fixed grid and time step.
#[derive(Debug, Clone)]
pub struct AxisymStepper {
    grid: AxisymGrid,
    dt: f64,
    swirl_source: bool,
    f_solver: ImplicitSolver,
    eta_solver: ImplicitSolver,
}

impl AxisymStepper {
    pub fn new(grid: AxisymGrid, dt: f64, swirl_source: bool) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
        }
        Ok(Self {
            grid,
            dt,
            swirl_source,
            f_solver: ImplicitSolver::new(RadialOperator::Meridional, grid, dt)?,
            eta_solver: ImplicitSolver::new(RadialOperator::FiveDim, grid, dt)?,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> AxisymGrid {
        self.grid
    }

    fn evolve_f(&self, f: &[f64], u_r: &[f64], u_z: &[f64]) -> Vec<f64> {
        let rhs = upwind(&self.grid, f, u_r, u_z, self.dt);
        self.f_solver.solve(&rhs, f)
    }

    fn evolve_eta(&self, eta: &[f64], f: &[f64], u_r: &[f64], u_z: &[f64], source: bool) -> Vec<f64> {
        let mut rhs = upwind(&self.grid, eta, u_r, u_z, self.dt);
        if source {
            for (v, s) in rhs.iter_mut().zip(swirl_source(&self.grid, f)) {
                *v += self.dt * s;
            }
        }
        self.eta_solver.solve(&rhs, eta)
    }

    /// Velocity from the current stream function, CFL check, `f` and `eta`
    /// updates (the source uses the old `f`), then a new stream function.
    /// Outer-boundary values of `f` and `eta` are held fixed.
    pub fn step(&self, s: &SwirlState) -> Result<SwirlState> {
        if s.grid != self.grid {
            return Err(Error::Shape("state grid differs from the stepper grid".into()));
        }
        let (u_r, u_z) = s.velocity();
        check_cfl(&self.grid, &u_r, &u_z, self.dt)?;
        let f = self.evolve_f(&s.f.samples, &u_r, &u_z);
        let eta = self.evolve_eta(&s.eta.samples, &s.f.samples, &u_r, &u_z, self.swirl_source);
        let (psi, _) = solve_stream(&self.grid, &eta, Some(&s.psi.samples))?;
        Ok(SwirlState::assemble(self.grid, f, eta, psi, s.time + self.dt))
    }
}

fn meridional_len_ok(g: &AxisymGrid, u_r: &[f64], u_z: &[f64]) -> Result<()> {
    if u_r.len() != g.len() || u_z.len() != g.len() {
        return Err(Error::Shape("meridional velocity does not match the grid".into()));
    }
    Ok(())
}

/// One step of `f_t + u_r f_r + u_z f_z = Delta f - (2/r) f_r`.
pub fn swirl_evolve(s: &SwirlState, u_r: &[f64], u_z: &[f64], dt: f64) -> Result<AxisymScalar> {
    let g = s.grid;
    meridional_len_ok(&g, u_r, u_z)?;
    check_cfl(&g, u_r, u_z, dt)?;
    let stepper = AxisymStepper::new(g, dt, false)?;
    Ok(AxisymScalar {
        grid: g,
        samples: stepper.evolve_f(&s.f.samples, u_r, u_z),
        parity: Parity::Even,
        time: s.time + dt,
    })
}

/// One step of `eta_t + u_r eta_r + u_z eta_z = Delta_5 eta (+ d_z(f^2)/r^4)`.
pub fn eta_evolve(s: &SwirlState, u_r: &[f64], u_z: &[f64], dt: f64, swirl_source: bool) -> Result<AxisymScalar> {
    let g = s.grid;
    if s.eta.parity != Parity::Even {
        return Err(Error::Parity("eta must be even across the axis".into()));
    }
    meridional_len_ok(&g, u_r, u_z)?;
    check_cfl(&g, u_r, u_z, dt)?;
    let stepper = AxisymStepper::new(g, dt, swirl_source)?;
    Ok(AxisymScalar {
        grid: g,
        samples: stepper.evolve_eta(&s.eta.samples, &s.f.samples, u_r, u_z, swirl_source),
        parity: Parity::Even,
        time: s.time + dt,
    })
}

/// Single coupled step with the swirl source switched on.
pub fn axisym_step(s: &SwirlState, dt: f64) -> Result<SwirlState> {
    AxisymStepper::new(s.grid, dt, true)?.step(s)
}

/// `steps` coupled steps, keeping every `every`-th state and the last one.
pub fn axisym_run(initial: &SwirlState, dt: f64, steps: usize, every: usize, swirl_source: bool) -> Result<Vec<SwirlState>> {
    let stepper = AxisymStepper::new(initial.grid, dt, swirl_source)?;
    let every = every.max(1);
    let mut out = vec![initial.clone()];
    let mut cur = initial.clone();
    for n in 1..=steps {
        cur = stepper.step(&cur)?;
        if n % every == 0 || n == steps {
            out.push(cur.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axisym::scenarios::{no_swirl_bump, rigid_rotation, swirl_bump};
    use proptest::prelude::*;

    fn grid() -> AxisymGrid {
        AxisymGrid::new(2.0, -2.0, 2.0, 33, 65).unwrap()
    }

    #[test]
    fn zero_state_stays_zero() {
        let s = SwirlState::zeros(grid());
        let n = axisym_step(&s, 1e-3).unwrap();
        assert!(n.f.samples.iter().chain(&n.eta.samples).chain(&n.psi.samples).all(|v| *v == 0.0));
    }

    #[test]
    fn rigid_rotation_is_stationary() {
        let s = rigid_rotation(grid()).unwrap();
        let dt = 1e-3;
        let stepper = AxisymStepper::new(s.grid, dt, true).unwrap();
        let mut cur = s.clone();
        for _ in 0..100 {
            let next = stepper.step(&cur).unwrap();
            let drift = next.f.samples.iter().zip(&cur.f.samples).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(drift <= 1e-8 * dt.max(1e-2), "{drift}");
            assert!(next.eta.sup_abs() <= 1e-12);
            cur = next;
        }
        let total = cur.f.samples.iter().zip(&s.f.samples).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(total / (100.0 * dt) <= 1e-10, "{total}");
    }

    #[test]
    fn unit_eta_without_flow_is_stationary() {
        let g = grid();
        let one = AxisymScalar::from_fn(g, Parity::Even, 0.0, |_, _| 1.0);
        let s = SwirlState::zeros(g);
        let zero = vec![0.0; g.len()];
        let st = SwirlState { eta: one.clone(), ..s };
        let e = eta_evolve(&st, &zero, &zero, 1e-2, false).unwrap();
        assert!(e.samples.iter().all(|v| (v - 1.0).abs() < 1e-13));
    }

    #[test]
    fn no_swirl_stays_swirl_free() {
        let s = no_swirl_bump(grid(), 5.0, 0.5, 0.0).unwrap();
        let run = axisym_run(&s, 2e-3, 1000, 100, true).unwrap();
        for st in &run {
            assert!(st.u_theta().iter().all(|v| v.abs() <= 1e-12));
        }
    }

    #[test]
    fn bump_maxima_do_not_grow() {
        let g = grid();
        let s = swirl_bump(g, 1.0, 0.5, 0.0).unwrap();
        let run = axisym_run(&s, 2e-3, 100, 1, true).unwrap();
        for w in run.windows(2) {
            assert!(w[1].f.sup_abs() <= w[0].f.sup_abs() + 1e-10);
        }
        assert!(run.last().unwrap().f.sup_abs() < s.f.sup_abs());

        let s = no_swirl_bump(g, 5.0, 0.5, 0.3).unwrap();
        let run = axisym_run(&s, 2e-3, 100, 1, false).unwrap();
        for w in run.windows(2) {
            assert!(w[1].eta.sup_abs() <= w[0].eta.sup_abs() + 1e-10);
        }
    }

    #[test]
    fn rigid_source_vanishes() {
        let s = rigid_rotation(grid()).unwrap();
        let src = swirl_source(&s.grid, &s.f.samples);
        assert!(src.iter().all(|v| v.abs() < 1e-12));
        let (u_r, u_z) = s.velocity();
        let e = eta_evolve(&s, &u_r, &u_z, 1e-3, true).unwrap();
        assert!(e.sup_abs() < 1e-12);
    }

    #[test]
    fn cfl_violation_rejected() {
        let s = no_swirl_bump(grid(), 50.0, 0.5, 0.0).unwrap();
        let (u_r, u_z) = s.velocity();
        assert!(matches!(swirl_evolve(&s, &u_r, &u_z, 10.0), Err(Error::Cfl(_))));
        assert!(matches!(axisym_step(&s, 10.0), Err(Error::Cfl(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn axis_regular_and_f_bounded(amp in 0.1..3.0f64, zc in -0.5..0.5f64, sigma in 0.3..0.8f64) {
            let g = AxisymGrid::new(2.0, -2.0, 2.0, 17, 33).unwrap();
            let s = swirl_bump(g, amp, sigma, zc).unwrap();
            let run = axisym_run(&s, 2e-3, 10, 1, true).unwrap();
            for w in run.windows(2) {
                prop_assert!(w[1].f.sup_abs() <= w[0].f.sup_abs() + 1e-10);
            }
            for st in &run {
                let fld = st.field();
                for j in 0..g.nz() {
                    let k = g.idx(0, j);
                    prop_assert!(fld.u_r[k] == 0.0 && fld.u_theta[k] == 0.0);
                }
            }
        }
    }
}
