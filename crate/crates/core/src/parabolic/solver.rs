use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{BandLu, BandMatrix};

type Drift = Arc<dyn Fn(&[f64], f64) -> [f64; 2] + Send + Sync>;
type Initial = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type Boundary = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;

/// Node grid on an axis-aligned box, boundary nodes included. Flat index is
/// `j * nx + i` with `i` along the first axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxGrid {
    pub dim: usize,
    pub nodes: [usize; 2],
    pub lower: [f64; 2],
    pub upper: [f64; 2],
}

impl BoxGrid {
    pub fn new(lower: &[f64], upper: &[f64], nodes: usize) -> Result<Self> {
        let dim = lower.len();
        if dim == 0 || dim > 2 || upper.len() != dim {
            return Err(Error::Dimension(format!("boxes are 1D or 2D, got {dim} bounds")));
        }
        if nodes < 3 {
            return Err(Error::InvalidInput(format!("need at least 3 nodes per axis, got {nodes}")));
        }
        let mut g = BoxGrid {
            dim,
            nodes: [nodes, 1],
            lower: [0.0; 2],
            upper: [0.0; 2],
        };
        for a in 0..dim {
            if !(upper[a] > lower[a]) || !lower[a].is_finite() || !upper[a].is_finite() {
                return Err(Error::Geometry(format!("empty box side [{}, {}]", lower[a], upper[a])));
            }
            g.lower[a] = lower[a];
            g.upper[a] = upper[a];
            g.nodes[a] = nodes;
        }
        Ok(g)
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / (self.nodes[axis] - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.nodes[0] * self.nodes[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        let (i, j) = (idx % self.nodes[0], idx / self.nodes[0]);
        let mut p = vec![self.lower[0] + i as f64 * self.spacing(0)];
        if self.dim == 2 {
            p.push(self.lower[1] + j as f64 * self.spacing(1));
        }
        p
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        let (i, j) = (idx % self.nodes[0], idx / self.nodes[0]);
        i == 0 || i + 1 == self.nodes[0] || (self.dim == 2 && (j == 0 || j + 1 == self.nodes[1]))
    }
}

/// Data for `u_t + a(x, t) . grad u - Delta u = 0` with Dirichlet values.
#[derive(Clone)]
pub struct ParabolicProblem {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub horizon: f64,
    pub drift: Drift,
    pub initial: Initial,
    pub boundary: Boundary,
}

impl std::fmt::Debug for ParabolicProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParabolicProblem")
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("horizon", &self.horizon)
            .finish_non_exhaustive()
    }
}

impl ParabolicProblem {
    /// Heat equation with constant initial and boundary value `c`.
    pub fn constant(lower: &[f64], upper: &[f64], horizon: f64, c: f64) -> Self {
        Self {
            lower: lower.to_vec(),
            upper: upper.to_vec(),
            horizon,
            drift: Arc::new(|_, _| [0.0, 0.0]),
            initial: Arc::new(move |_| c),
            boundary: Arc::new(move |_, _| c),
        }
    }

    pub fn with_drift(mut self, drift: impl Fn(&[f64], f64) -> [f64; 2] + Send + Sync + 'static) -> Self {
        self.drift = Arc::new(drift);
        self
    }

    pub fn with_initial(mut self, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.initial = Arc::new(f);
        self
    }

    pub fn with_boundary(mut self, f: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static) -> Self {
        self.boundary = Arc::new(f);
        self
    }
}

/// Node values at each time level.
#[derive(Debug, Clone)]
pub struct ScalarTrajectory {
    pub grid: BoxGrid,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub dt: f64,
    /// Measured `sup |a|` over the nodes and time levels used.
    pub drift_sup: f64,
}

impl ScalarTrajectory {
    pub fn last(&self) -> &[f64] {
        self.values.last().expect("trajectory is never empty")
    }
}

fn interior_map(g: &BoxGrid) -> (Vec<Option<usize>>, Vec<usize>) {
    let mut map = vec![None; g.len()];
    let mut nodes = Vec::new();
    for idx in 0..g.len() {
        if !g.is_boundary(idx) {
            map[idx] = Some(nodes.len());
            nodes.push(idx);
        }
    }
    (map, nodes)
}

fn neighbours(g: &BoxGrid, idx: usize, axis: usize) -> (usize, usize) {
    let stride = if axis == 0 { 1 } else { g.nodes[0] };
    (idx - stride, idx + stride)
}

/// `(I - dt Delta_h)` on the interior unknowns.
fn implicit_operator(g: &BoxGrid, map: &[Option<usize>], nodes: &[usize], dt: f64) -> Result<BandLu> {
    let band = if g.dim == 2 { g.nodes[0] - 2 } else { 1 };
    let mut m = BandMatrix::new(nodes.len(), band, band);
    for (row, &idx) in nodes.iter().enumerate() {
        m.add(row, row, 1.0);
        for axis in 0..g.dim {
            let c = dt / g.spacing(axis).powi(2);
            m.add(row, row, 2.0 * c);
            let (lo, hi) = neighbours(g, idx, axis);
            for nb in [lo, hi] {
                if let Some(col) = map[nb] {
                    m.add(row, col, -c);
                }
            }
        }
    }
    m.factor()
}

/// Advance from `t = 0` to the horizon.
///
/// The step is shrunk so that the horizon is an integer number of steps. The
/// drift is sampled at every node and time level before stepping and the
/// run is rejected when `dt * sum_i |a_i| / h_i > 1`.
pub fn parabolic_solve(p: &ParabolicProblem, nodes: usize, dt: f64) -> Result<ScalarTrajectory> {
    let g = BoxGrid::new(&p.lower, &p.upper, nodes)?;
    if !(p.horizon > 0.0) || !p.horizon.is_finite() {
        return Err(Error::Domain(format!("horizon must be positive, got {}", p.horizon)));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
    }
    let steps = ((p.horizon / dt) - 1e-9).ceil().max(1.0) as usize;
    let dt = p.horizon / steps as f64;
    let points: Vec<Vec<f64>> = (0..g.len()).map(|i| g.point(i)).collect();
    let (map, interior) = interior_map(&g);

    // drift table and CFL check before any stepping
    let mut drift = Vec::with_capacity(steps);
    let mut drift_sup: f64 = 0.0;
    for n in 0..steps {
        let t = n as f64 * dt;
        let mut level = Vec::with_capacity(interior.len());
        for &idx in &interior {
            let a = (p.drift)(&points[idx], t);
            let mut courant = 0.0;
            let mut mag = 0.0;
            for axis in 0..g.dim {
                if !a[axis].is_finite() {
                    return Err(Error::InvalidInput(format!("non-finite drift at {:?}", points[idx])));
                }
                courant += dt * a[axis].abs() / g.spacing(axis);
                mag += a[axis] * a[axis];
            }
            if courant > 1.0 + 1e-12 {
                return Err(Error::Cfl(format!(
                    "dt * sum |a_i| / h_i = {courant:.6} > 1 at x = {:?}, t = {t}",
                    points[idx]
                )));
            }
            drift_sup = drift_sup.max(mag.sqrt());
            level.push(a);
        }
        drift.push(level);
    }

    let lu = implicit_operator(&g, &map, &interior, dt)?;
    let mut u: Vec<f64> = points
        .iter()
        .enumerate()
        .map(|(i, x)| if g.is_boundary(i) { (p.boundary)(x, 0.0) } else { (p.initial)(x) })
        .collect();
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite initial or boundary data".into()));
    }
    let mut times = vec![0.0];
    let mut values = vec![u.clone()];
    let mut rhs = vec![0.0; interior.len()];
    for (n, level) in drift.iter().enumerate() {
        let t1 = (n + 1) as f64 * dt;
        let mut next = u.clone();
        for (i, x) in points.iter().enumerate() {
            if g.is_boundary(i) {
                next[i] = (p.boundary)(x, t1);
            }
        }
        // solved for the increment, so constant states are reproduced exactly
        for (row, &idx) in interior.iter().enumerate() {
            let a = level[row];
            let mut v = 0.0;
            for axis in 0..g.dim {
                let h = g.spacing(axis);
                let c = dt / h.powi(2);
                let (lo, hi) = neighbours(&g, idx, axis);
                if a[axis] > 0.0 {
                    v -= dt * a[axis] * (u[idx] - u[lo]) / h;
                } else if a[axis] < 0.0 {
                    v -= dt * a[axis] * (u[hi] - u[idx]) / h;
                }
                for nb in [lo, hi] {
                    let known = if map[nb].is_none() { next[nb] } else { u[nb] };
                    v += c * (known - u[idx]);
                }
            }
            rhs[row] = v;
        }
        lu.solve(&mut rhs);
        for (row, &idx) in interior.iter().enumerate() {
            next[idx] = u[idx] + rhs[row];
        }
        u = next;
        times.push(t1);
        values.push(u.clone());
    }
    Ok(ScalarTrajectory {
        grid: g,
        times,
        values,
        dt,
        drift_sup,
    })
}
