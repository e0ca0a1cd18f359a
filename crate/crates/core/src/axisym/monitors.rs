use serde::{Deserialize, Serialize};

use crate::fields::AxisymGrid;

use super::state::SwirlState;
use super::step::courant;

/// Nodes closer than this many rings to the outer boundary are left out of
/// `sup_rho_u` and of the primitive residuals.
pub const EXCLUDED_RINGS: usize = 2;
pub const MONOTONE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorRow {
    pub t: f64,
    pub sup_f: f64,
    pub inf_f: f64,
    pub sup_eta: f64,
    pub sup_rho_u: f64,
    pub cfl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleReport {
    pub rows: Vec<MonitorRow>,
    pub sup_f_nonincreasing: bool,
    pub sup_eta_nonincreasing: bool,
    pub excluded_rings: usize,
}

impl LiouvilleReport {
    pub const CSV_HEADER: &'static str = "t,sup_f,inf_f,sup_eta,sup_rho_u,cfl";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.t, r.sup_f, r.inf_f, r.sup_eta, r.sup_rho_u, r.cfl
            ));
        }
        s
    }
}

/// `sup r |u|` over nodes at least [`EXCLUDED_RINGS`] from the outer boundary.
pub fn sup_rho_u(s: &SwirlState) -> f64 {
    let g = &s.grid;
    let fld = s.field();
    let mut m: f64 = 0.0;
    for j in 0..g.nz() {
        for i in 0..g.nr() {
            if g.rings_from_outer(i, j) >= EXCLUDED_RINGS {
                m = m.max(g.r(i) * fld.magnitude(g.idx(i, j)));
            }
        }
    }
    m
}

/// Time series of the maximum-principle scalars and the `r |u|` bound.
/// `cfl` is the Courant number of each state at step `dt`.
pub fn liouville_monitors(states: &[SwirlState], dt: f64) -> LiouvilleReport {
    let rows: Vec<MonitorRow> = states
        .iter()
        .map(|s| {
            let (u_r, u_z) = s.velocity();
            MonitorRow {
                t: s.time,
                sup_f: s.f.sup_abs(),
                inf_f: s.f.min(),
                sup_eta: s.eta.sup_abs(),
                sup_rho_u: sup_rho_u(s),
                cfl: courant(&s.grid, &u_r, &u_z, dt),
            }
        })
        .collect();
    let mono = |get: fn(&MonitorRow) -> f64| rows.windows(2).all(|w| get(&w[1]) <= get(&w[0]) + MONOTONE_TOL);
    LiouvilleReport {
        sup_f_nonincreasing: mono(|r| r.sup_f),
        sup_eta_nonincreasing: mono(|r| r.sup_eta),
        excluded_rings: EXCLUDED_RINGS,
        rows,
    }
}

/// Sup-norm residuals of the swirl and azimuthal-vorticity equations in
/// primitive variables, evaluated between two consecutive states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveResiduals {
    pub swirl: f64,
    pub vorticity: f64,
    /// Sup of the swirl forcing `d_z(u_theta^2) / r` on the same nodes.
    pub forcing: f64,
}

struct Prim {
    u_r: Vec<f64>,
    u_t: Vec<f64>,
    u_z: Vec<f64>,
    w: Vec<f64>,
}

fn prim(s: &SwirlState) -> Prim {
    let (u_r, u_z) = s.velocity();
    Prim {
        u_r,
        u_t: s.u_theta(),
        u_z,
        w: s.omega_theta(),
    }
}

/// Residuals of
/// `d_t u_th + u.grad u_th + u_r u_th / r - (Delta u_th - u_th / r^2)` and
/// `d_t w + u.grad w - u_r w / r - (Delta w - w / r^2) - d_z(u_th^2) / r`
/// with a forward time difference and spatial terms averaged over the two
/// states. Nodes with `i < 2` or within [`EXCLUDED_RINGS`] of the outer
/// boundary are skipped.
pub fn primitive_residuals(a: &SwirlState, b: &SwirlState) -> PrimitiveResiduals {
    let g: AxisymGrid = a.grid;
    let dt = b.time - a.time;
    let (pa, pb) = (prim(a), prim(b));
    let (nr, dr, dz) = (g.nr(), g.dr(), g.dz());
    let mut out = PrimitiveResiduals {
        swirl: 0.0,
        vorticity: 0.0,
        forcing: 0.0,
    };
    for j in 0..g.nz() {
        for i in 2..nr {
            if g.rings_from_outer(i, j) < EXCLUDED_RINGS {
                continue;
            }
            let k = g.idx(i, j);
            let r = g.r(i);
            let d_r = |v: &[f64]| (v[k + 1] - v[k - 1]) / (2.0 * dr);
            let d_z = |v: &[f64]| (v[k + nr] - v[k - nr]) / (2.0 * dz);
            let lap = |v: &[f64]| {
                (v[k + 1] - 2.0 * v[k] + v[k - 1]) / (dr * dr)
                    + d_r(v) / r
                    + (v[k + nr] - 2.0 * v[k] + v[k - nr]) / (dz * dz)
            };
            let terms = |p: &Prim| {
                let ur = p.u_r[k];
                let uz = p.u_z[k];
                let sw = ur * d_r(&p.u_t) + uz * d_z(&p.u_t) + ur * p.u_t[k] / r
                    - (lap(&p.u_t) - p.u_t[k] / (r * r));
                let sq: Vec<f64> = [k - nr, k + nr].iter().map(|&m| p.u_t[m] * p.u_t[m]).collect();
                let forcing = (sq[1] - sq[0]) / (2.0 * dz) / r;
                let vo = ur * d_r(&p.w) + uz * d_z(&p.w) - ur * p.w[k] / r - (lap(&p.w) - p.w[k] / (r * r)) - forcing;
                (sw, vo, forcing)
            };
            let (sa, va, fa) = terms(&pa);
            let (sb, vb, fb) = terms(&pb);
            let swirl = (pb.u_t[k] - pa.u_t[k]) / dt + 0.5 * (sa + sb);
            let vort = (pb.w[k] - pa.w[k]) / dt + 0.5 * (va + vb);
            out.swirl = out.swirl.max(swirl.abs());
            out.vorticity = out.vorticity.max(vort.abs());
            out.forcing = out.forcing.max(fa.abs().max(fb.abs()));
        }
    }
    out
}

/// Node values as CSV: `r,z,f,eta,psi,u_r,u_theta,u_z`.
pub fn fields_csv(s: &SwirlState) -> String {
    let g = &s.grid;
    let fld = s.field();
    let mut out = String::from("r,z,f,eta,psi,u_r,u_theta,u_z\n");
    for j in 0..g.nz() {
        for i in 0..g.nr() {
            let k = g.idx(i, j);
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                g.r(i),
                g.z(j),
                s.f.samples[k],
                s.eta.samples[k],
                s.psi.samples[k],
                fld.u_r[k],
                fld.u_theta[k],
                fld.u_z[k]
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axisym::scenarios::{coupled_bump, no_swirl_bump, rigid_rotation, swirl_bump};
    use crate::axisym::step::{axisym_run, AxisymStepper};

    #[test]
    fn monitors_flag_monotone_scalars() {
        let g = AxisymGrid::new(2.0, -2.0, 2.0, 33, 65).unwrap();
        let run = axisym_run(&no_swirl_bump(g, 5.0, 0.5, 0.0).unwrap(), 2e-3, 60, 10, false).unwrap();
        let rep = liouville_monitors(&run, 2e-3);
        assert!(rep.sup_eta_nonincreasing);
        assert_eq!(rep.rows.len(), 7);
        let run = axisym_run(&swirl_bump(g, 1.0, 0.5, 0.0).unwrap(), 2e-3, 60, 10, true).unwrap();
        assert!(liouville_monitors(&run, 2e-3).sup_f_nonincreasing);
    }

    #[test]
    fn rigid_rotation_breaks_inverse_distance_bound() {
        // u_theta = r, so r |u| = r^2 and the sup grows with the domain
        let mut sups = Vec::new();
        for rm in [1.0, 2.0, 4.0] {
            let g = AxisymGrid::new(rm, -1.0, 1.0, 33, 17).unwrap();
            let s = rigid_rotation(g).unwrap();
            let inner = g.r(g.nr() - 1 - EXCLUDED_RINGS);
            assert!((sup_rho_u(&s) - inner * inner).abs() < 1e-12);
            sups.push(sup_rho_u(&s));
        }
        assert!(sups[0] < sups[1] && sups[1] < sups[2]);
    }

    #[test]
    fn csv_layout() {
        let g = AxisymGrid::new(1.0, 0.0, 1.0, 8, 8).unwrap();
        let s = rigid_rotation(g).unwrap();
        let rep = liouville_monitors(&[s.clone()], 1e-3);
        let text = rep.to_csv();
        assert!(text.starts_with("t,sup_f,inf_f,sup_eta,sup_rho_u,cfl\n"));
        assert_eq!(text.lines().count(), 2);
        assert_eq!(fields_csv(&s).lines().count(), 65);
    }

    fn residuals(n: usize, source: bool) -> PrimitiveResiduals {
        let g = AxisymGrid::new(2.0, -2.0, 2.0, n, 2 * n - 1).unwrap();
        let s = coupled_bump(g, 3.0, 4.0, 0.6).unwrap();
        let dt = 0.25 * g.dr() * g.dr();
        let st = AxisymStepper::new(g, dt, source).unwrap();
        let mut a = s;
        for _ in 0..4 {
            a = st.step(&a).unwrap();
        }
        let b = st.step(&a).unwrap();
        primitive_residuals(&a, &b)
    }

    #[test]
    fn derived_source_satisfies_primitive_equations() {
        let coarse = residuals(33, true);
        let fine = residuals(65, true);
        let control = residuals(65, false);
        assert!(fine.vorticity < coarse.vorticity, "{coarse:?} {fine:?}");
        assert!(fine.swirl < coarse.swirl);
        assert!(fine.vorticity < 0.1 * control.vorticity, "{fine:?} {control:?}");
        assert!(fine.vorticity < 0.1 * fine.forcing);
    }
}
