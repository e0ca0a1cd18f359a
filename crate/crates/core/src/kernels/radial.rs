//! Moments `int_0^1 tau^p e^{-y tau^q} dtau` behind the radial derivatives of
//! the generating function.

use statrs::function::gamma::{gamma_lr, ln_gamma};

const SERIES_MAX_TERMS: usize = 200;

/// `J_m(y) = int_0^1 tau^{2m} exp(-y tau^2) dtau`, `y >= 0`.
pub(crate) fn gauss_moment(m: usize, y: f64) -> f64 {
    if y < 3.0 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 0..SERIES_MAX_TERMS {
            let add = term / (2 * (k + m) + 1) as f64;
            sum += add;
            if add.abs() <= 1e-18 * sum.abs() {
                break;
            }
            term *= -y / (k + 1) as f64;
        }
        return sum;
    }
    // int_0^1 tau^{2m} e^{-y tau^2} dtau = gamma(m + 1/2, y) / (2 y^{m + 1/2})
    let a = m as f64 + 0.5;
    ln_gamma(a).exp() * gamma_lr(a, y) / (2.0 * y.powf(a))
}

/// `P_j(y) = int_0^1 tau^j exp(-y tau) dtau`, `y >= 0`.
pub(crate) fn exp_moment(j: usize, y: f64) -> f64 {
    if y < 2.0 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 0..SERIES_MAX_TERMS {
            let add = term / (k + j + 1) as f64;
            sum += add;
            if add.abs() <= 1e-18 * sum.abs() {
                break;
            }
            term *= -y / (k + 1) as f64;
        }
        return sum;
    }
    let a = (j + 1) as f64;
    ln_gamma(a).exp() * gamma_lr(a, y) / y.powf(a)
}
