//! Disc and circle quadrature for the planar Green identity
//! `int_B (u_{2,1} - u_{1,2}) dx = oint (u_2 n_1 - u_1 n_2) ds`.

use std::f64::consts::PI;

use serde::Serialize;

use super::interp::PointEvaluator;
use super::spectral::Spectral;
use super::torus::VectorField;
use crate::error::{Error, Result};
use crate::quad::gauss_legendre_on;

pub const RADIAL_NODES: usize = 48;
pub const ANGULAR_NODES: usize = 128;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GreenIdentity {
    pub area_integral: f64,
    pub boundary_integral: f64,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
}

/// Integral of `f` over the disc, Gauss-Legendre in radius and the periodic
/// trapezoid rule in angle.
pub fn disc_integral(
    f: impl Fn(f64, f64) -> f64,
    center: [f64; 2],
    radius: f64,
    radial_nodes: usize,
    angular_nodes: usize,
) -> f64 {
    let (rs, ws) = gauss_legendre_on(radial_nodes, 0.0, radius);
    let dtheta = 2.0 * PI / angular_nodes as f64;
    let mut total = 0.0;
    for (r, w) in rs.iter().zip(&ws) {
        let mut ring = 0.0;
        for k in 0..angular_nodes {
            let th = k as f64 * dtheta;
            ring += f(center[0] + r * th.cos(), center[1] + r * th.sin());
        }
        total += w * r * ring * dtheta;
    }
    total
}

/// `oint (u_2 n_1 - u_1 n_2) ds` over the circle, periodic trapezoid rule.
pub fn circle_flux(
    u: impl Fn(f64, f64) -> [f64; 2],
    center: [f64; 2],
    radius: f64,
    angular_nodes: usize,
) -> f64 {
    let dtheta = 2.0 * PI / angular_nodes as f64;
    let mut total = 0.0;
    for k in 0..angular_nodes {
        let th = k as f64 * dtheta;
        let (c, s) = (th.cos(), th.sin());
        let v = u(center[0] + radius * c, center[1] + radius * s);
        total += v[1] * c - v[0] * s;
    }
    total * radius * dtheta
}

pub fn green_identity_check(v: &VectorField, center: [f64; 2], radius: f64) -> Result<GreenIdentity> {
    if v.dim() != 2 {
        return Err(Error::Dimension("Green identity check is planar".into()));
    }
    let l = v.grid.period();
    if !(radius > 0.0)
        || center[0] - radius < 0.0
        || center[1] - radius < 0.0
        || center[0] + radius > l
        || center[1] + radius > l
    {
        return Err(Error::Geometry(format!(
            "disc centered at ({}, {}) with radius {radius} leaves the fundamental domain [0, {l}]^2",
            center[0], center[1]
        )));
    }
    let sp = Spectral::new(v.grid);
    let w = sp.curl2d(v)?;
    let ew = PointEvaluator::new(&sp, &w.samples);
    let e1 = PointEvaluator::new(&sp, &v.components[0]);
    let e2 = PointEvaluator::new(&sp, &v.components[1]);
    let area = disc_integral(|x, y| ew.value(&[x, y]), center, radius, RADIAL_NODES, ANGULAR_NODES);
    let boundary = circle_flux(
        |x, y| [e1.value(&[x, y]), e2.value(&[x, y])],
        center,
        radius,
        ANGULAR_NODES,
    );
    Ok(GreenIdentity {
        area_integral: area,
        boundary_integral: boundary,
        radial_nodes: RADIAL_NODES,
        angular_nodes: ANGULAR_NODES,
    })
}
