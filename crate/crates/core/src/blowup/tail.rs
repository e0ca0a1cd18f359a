use std::cell::RefCell;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::integrate;

const INNER_TOL: f64 = 1e-11;
const OUTER_TOL: f64 = 1e-9;

/// `I(M) = (4 pi / M^3) int_{-1}^0 int_{|x'| <= M/2} (sqrt(-tau) + |x'|/M)^{-2} dx' dtau`,
/// the `x_3` factor already integrated. With `tau = -a^2` the time integral
/// becomes `int_0^1 2a da`, and the disc integral is radial; both are done
/// by adaptive quadrature, the radial one split at the peak `rho = a M`.
pub fn tail_integral(m: f64) -> Result<f64> {
    if !(m >= 1.0 && m.is_finite()) {
        return Err(Error::Domain(format!("tail integral needs M >= 1, got {m}")));
    }
    let half = 0.5 * m;
    let inner = |a: f64| -> Result<f64> {
        let g = |rho: f64| 2.0 * PI * rho / (a + rho / m).powi(2);
        let split = (a * m).min(half);
        let lo = integrate(g, 0.0, split, 0.0, INNER_TOL)?;
        let hi = integrate(g, split, half, 0.0, INNER_TOL)?;
        Ok(lo.value + hi.value)
    };
    // the outer integrand is a log a near 0; integrate by geometric panels
    let mut total = 0.0;
    let failure = RefCell::new(None);
    let mut edges = vec![0.0];
    edges.extend((0..40).rev().map(|k| 0.5f64.powi(k)));
    for w in edges.windows(2) {
        let r = integrate(
            |a| match inner(a) {
                Ok(v) => 2.0 * a * v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            w[0],
            w[1],
            0.0,
            OUTER_TOL,
        );
        match r {
            Ok(q) => total += q.value,
            Err(e) => return Err(Error::Accuracy(format!("tail integral outer quadrature failed: {e}"))),
        }
    }
    if let Some(e) = failure.into_inner() {
        return Err(Error::Accuracy(format!("tail integral inner quadrature failed: {e}")));
    }
    if !total.is_finite() {
        return Err(Error::Accuracy("tail integral is not finite".into()));
    }
    Ok(4.0 * PI / m.powi(3) * total)
}
