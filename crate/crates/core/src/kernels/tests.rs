use super::*;
use proptest::prelude::*;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponential integral: power series below 1, Lentz continued fraction above.
fn e1(y: f64) -> f64 {
    if y < 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -y / k as f64;
            sum += term / k as f64;
        }
        -EULER_GAMMA - y.ln() - sum
    } else {
        let tiny = 1e-300;
        let mut b = y + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-y).exp()
    }
}

fn phi2_oracle(rho: f64, t: f64) -> f64 {
    if rho == 0.0 {
        return (EULER_GAMMA - (4.0 * t).ln()) / (4.0 * PI);
    }
    -rho.ln() / (2.0 * PI) - e1(rho * rho / (4.0 * t)) / (4.0 * PI)
}

/// Composite Simpson in (r, mu) of `int G(y) Gamma(x - y, t) dy`, n = 3,
/// with `x` on the polar axis.
fn phi3_direct(rho: f64, t: f64) -> f64 {
    let rmax = rho + 14.0 * t.sqrt();
    let (nr, nm) = (4000, 400);
    let hr = rmax / nr as f64;
    let hm = 2.0 / nm as f64;
    let w = |i: usize, n: usize| if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
    let norm = (4.0 * PI * t).powf(-1.5);
    let mut total = 0.0;
    for i in 0..=nr {
        let r = i as f64 * hr;
        let mut inner = 0.0;
        for j in 0..=nm {
            let mu = -1.0 + j as f64 * hm;
            inner += w(j, nm) * (-(r * r + rho * rho - 2.0 * r * rho * mu) / (4.0 * t)).exp();
        }
        // G(y) r^2 = r / (4 pi)
        total += w(i, nr) * inner * hm / 3.0 * r / (4.0 * PI) * 2.0 * PI;
    }
    total * hr / 3.0 * norm
}

fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = 0.0;
    for n in 0..80 {
        sum += term / (2 * n + 1) as f64;
        term *= -x * x / (n + 1) as f64;
    }
    2.0 / PI.sqrt() * sum
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn heat_kernel_examples() {
    assert!((heat_kernel(&[0.0, 0.0], 1.0).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-15);
    assert!((heat_kernel(&[2.0, 0.0], 1.0).unwrap() - (-1f64).exp() / (4.0 * PI)).abs() < 1e-15);
    assert!(matches!(heat_kernel(&[0.0, 0.0], 0.0), Err(Error::Domain(_))));
    assert!(matches!(heat_kernel(&[0.0, 0.0], -1.0), Err(Error::Domain(_))));
}

#[test]
fn heat_kernel_unit_mass() {
    // midpoint rule on [-12, 12]^2 at t = 1: spectrally accurate for a Gaussian
    let m = 480;
    let h = 24.0 / m as f64;
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..m {
            let x = [-12.0 + (i as f64 + 0.5) * h, -12.0 + (j as f64 + 0.5) * h];
            let v = heat_kernel(&x, 1.0).unwrap();
            assert!(v >= 0.0);
            total += v * h * h;
        }
    }
    assert!((total - 1.0).abs() < 1e-8);
}

#[test]
fn green_examples() {
    assert!((laplace_green(&[1.0, 0.0, 0.0]).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-16);
    assert_eq!(laplace_green(&[0.6, 0.8]).unwrap(), 0.0);
    let x = [0.3, -0.4, 1.2];
    let x2 = [0.6, -0.8, 2.4];
    assert!(rel(laplace_green(&x2).unwrap(), laplace_green(&x).unwrap() / 2.0) < 1e-15);
    assert!(matches!(laplace_green(&[0.0, 0.0]), Err(Error::Singular(_))));
    assert!(matches!(laplace_green(&[1.0]), Err(Error::Dimension(_))));
}

#[test]
fn phi3_closed_form_and_direct_quadrature() {
    let v = generating_phi(&[1.0, 0.0, 0.0], 1.0).unwrap();
    let closed = erf_series(0.5) / (4.0 * PI);
    assert!(rel(v, closed) < 1e-14, "{v} vs {closed}");
    assert!((v - 0.041418).abs() < 5e-6);
    for &(rho, t) in &[(1.0, 1.0), (0.3, 0.05), (2.5, 0.7)] {
        let direct = phi3_direct(rho, t);
        let got = generating_phi(&[0.0, rho, 0.0], t).unwrap();
        assert!((got - direct).abs() < 1e-8, "rho={rho} t={t}: {got} vs {direct}");
    }
}

#[test]
fn phi2_matches_exponential_integral() {
    for &rho in &[0.0, 1e-4, 0.1, 0.7, 1.0, 2.0, 5.0, 30.0] {
        for &t in &[1e-3, 0.1, 0.5, 1.0, 10.0] {
            let got = generating_phi(&[rho * 0.6, rho * 0.8], t).unwrap();
            let want = phi2_oracle(rho, t);
            assert!(
                (got - want).abs() <= 1e-10 * want.abs().max(1e-2),
                "rho={rho} t={t}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn phi_tends_to_green() {
    for k in 0..10 {
        let a = 0.37 * k as f64;
        let r = 0.5 + 0.25 * k as f64;
        for x in [vec![r * a.cos(), r * a.sin(), 0.3], vec![r * a.cos() + 0.05, r * a.sin()]] {
            let g = laplace_green(&x).unwrap();
            let p = generating_phi(&x, 1e-6).unwrap();
            assert!(rel(p, g) <= 1e-4, "{x:?}: {p} vs {g}");
        }
    }
    let x = [0.4, 0.1, -0.2];
    assert_eq!(generating_phi(&x, 0.0).unwrap(), laplace_green(&x).unwrap());
    assert!(matches!(generating_phi(&[0.0, 0.0, 0.0], 0.0), Err(Error::Singular(_))));
}

/// `|d_t Phi - Delta Phi|` by central differences.
fn heat_residual(x: &[f64], t: f64, h: f64) -> f64 {
    let f = |y: &[f64], s: f64| generating_phi(y, s).unwrap();
    let dt = (f(x, t + h) - f(x, t - h)) / (2.0 * h);
    let mut lap = 0.0;
    for a in 0..x.len() {
        let mut p = x.to_vec();
        let mut m = x.to_vec();
        p[a] += h;
        m[a] -= h;
        lap += (f(&p, t) - 2.0 * f(x, t) + f(&m, t)) / (h * h);
    }
    (dt - lap).abs()
}

#[test]
fn phi_solves_heat_equation() {
    let r3 = heat_residual(&[0.6, 0.0, 0.8], 0.5, 1e-3);
    assert!(r3 <= 1e-6, "n=3 residual {r3}");
    let r2 = heat_residual(&[0.6, 0.8], 0.5, 1e-2);
    assert!(r2 <= 1e-4, "n=2 residual {r2}");
}

#[test]
fn kij_symmetric_and_divergence_free() {
    let x = [0.48, -0.6, 0.64];
    let t = 0.5;
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(oseen_kij(i, j, &x, t).unwrap(), oseen_kij(j, i, &x, t).unwrap());
        }
        let h = 1e-3;
        let mut div = 0.0;
        for j in 0..3 {
            let mut p = x;
            let mut m = x;
            p[j] += h;
            m[j] -= h;
            let mut p2 = x;
            let mut m2 = x;
            p2[j] += 2.0 * h;
            m2[j] -= 2.0 * h;
            let k = |y: &[f64]| oseen_kij(i, j, y, t).unwrap();
            div += (-k(&p2) + 8.0 * k(&p) - 8.0 * k(&m) + k(&m2)) / (12.0 * h);
        }
        assert!(div.abs() <= 1e-6, "row {i}: {div}");
    }
}

#[test]
fn analytic_derivatives_match_finite_differences() {
    let pts3: [([f64; 3], f64); 3] = [([0.48, -0.6, 0.64], 0.5), ([2.0, 0.5, -1.0], 0.1), ([0.1, 0.05, 0.0], 2.0)];
    for (x, t) in pts3 {
        for i in 0..3 {
            for j in 0..3 {
                let a = oseen_kij(i, j, &x, t).unwrap();
                let f = oseen_kij_with(i, j, &x, t, DerivativeMethod::FiniteDifference).unwrap();
                assert!((a - f).abs() <= 1e-6 * a.abs().max(1e-2), "K{i}{j} {a} vs {f}");
                for k in 0..3 {
                    let a = oseen_kijk(i, j, k, &x, t).unwrap();
                    let f = oseen_kijk_with(i, j, k, &x, t, DerivativeMethod::FiniteDifference).unwrap();
                    assert!((a - f).abs() <= 1e-4 * a.abs().max(1e-2), "K{i}{j}{k} {a} vs {f}");
                }
            }
        }
    }
    // n = 2: the quadrature noise in Phi limits the difference route
    for (x, t) in [([0.6, 0.8], 0.5), ([1.5, -0.2], 0.2)] {
        for i in 0..2 {
            for j in 0..2 {
                let a = oseen_kij(i, j, &x, t).unwrap();
                let f = oseen_kij_with(i, j, &x, t, DerivativeMethod::FiniteDifference).unwrap();
                assert!((a - f).abs() <= 1e-3 * a.abs().max(1e-2), "K{i}{j} {a} vs {f}");
            }
        }
    }
}

#[test]
fn kernels_at_time_zero_are_the_stokes_limit() {
    let x = [0.3, -0.7, 0.5];
    let a = oseen_kij(0, 1, &x, 0.0).unwrap();
    let b = oseen_kij(0, 1, &x, 1e-9).unwrap();
    assert!(rel(a, b) < 1e-6);
}

#[test]
fn kijk_bound_ratio_is_moderate() {
    let fit = verify_decay(KernelKind::Kijk, 3, &log_scales(0.5, 5.0, 20)).unwrap();
    for r in &fit.bound_ratio {
        assert!(*r <= 10.0, "bound ratio {r}");
    }
}

#[test]
fn decay_slopes() {
    let scales = log_scales(1.0, 100.0, 20);
    let kij = verify_decay(KernelKind::Kij, 3, &scales).unwrap();
    assert!((kij.slope + 3.0).abs() <= 0.15, "{}", kij.slope);
    let kijk = verify_decay(KernelKind::Kijk, 3, &scales).unwrap();
    assert!((kijk.slope + 4.0).abs() <= 0.2, "{}", kijk.slope);
    let gamma = verify_decay(KernelKind::Gamma, 2, &scales).unwrap();
    assert!((gamma.slope + 2.0).abs() <= 1e-10, "{}", gamma.slope);
}

#[test]
fn degenerate_fits_rejected() {
    assert!(matches!(verify_decay(KernelKind::Kij, 3, &log_scales(1.0, 2.0, 5)), Err(Error::Fit(_))));
    assert!(matches!(verify_decay(KernelKind::Kij, 3, &[1.0; 25]), Err(Error::Fit(_))));
    let mut bad = log_scales(1.0, 2.0, 25);
    bad[3] = -1.0;
    assert!(matches!(verify_decay(KernelKind::Kij, 3, &bad), Err(Error::Fit(_))));
}

#[test]
fn query_validation_and_warnings() {
    let q = KernelQuery { kind: KernelKind::Kij, indices: vec![0, 3], x: vec![1.0, 0.0, 0.0], t: 1.0 };
    assert!(matches!(evaluate(&q, DerivativeMethod::Analytic), Err(Error::InvalidInput(_))));
    let q = KernelQuery { kind: KernelKind::Kijk, indices: vec![0, 1], x: vec![1.0, 0.0, 0.0], t: 1.0 };
    assert!(evaluate(&q, DerivativeMethod::Analytic).is_err());
    let q = KernelQuery { kind: KernelKind::Kij, indices: vec![0, 0], x: vec![0.0, 0.0, 0.0], t: 0.0 };
    assert!(matches!(evaluate(&q, DerivativeMethod::Analytic), Err(Error::Singular(_))));
    let near = KernelQuery { kind: KernelKind::Kij, indices: vec![0, 1], x: vec![1e-7, 1e-7, 0.0], t: 0.0 };
    assert!(evaluate(&near, DerivativeMethod::Analytic).unwrap().warning.is_some());
    let fd = KernelQuery { kind: KernelKind::Kij, indices: vec![0, 1], x: vec![1e-3, 1e-3, 0.0], t: 0.0 };
    assert!(evaluate(&fd, DerivativeMethod::FiniteDifference).unwrap().warning.is_some());
    let ok = KernelQuery { kind: KernelKind::Kij, indices: vec![0, 1], x: vec![1.0, 1.0, 0.0], t: 0.0 };
    assert!(evaluate(&ok, DerivativeMethod::Analytic).unwrap().warning.is_none());
}

proptest! {
    #[test]
    fn kij_symmetry_random(x0 in -3.0..3.0f64, x1 in -3.0..3.0f64, x2 in -3.0..3.0f64, t in 0.01..4.0f64,
                           i in 0usize..3, j in 0usize..3) {
        let x = [x0, x1, x2];
        prop_assert_eq!(oseen_kij(i, j, &x, t).unwrap(), oseen_kij(j, i, &x, t).unwrap());
        for k in 0..3 {
            prop_assert_eq!(oseen_kijk(i, j, k, &x, t).unwrap(), oseen_kijk(j, i, k, &x, t).unwrap());
        }
    }

    #[test]
    fn heat_kernel_nonnegative(x0 in -50.0..50.0f64, x1 in -50.0..50.0f64, t in 1e-3..100.0f64) {
        prop_assert!(heat_kernel(&[x0, x1], t).unwrap() >= 0.0);
    }

    #[test]
    fn kernel_parabolic_scaling(x0 in -2.0..2.0f64, x1 in -2.0..2.0f64, x2 in -2.0..2.0f64,
                                t in 0.05..2.0f64, lam in 0.2..5.0f64) {
        // K_ij(lam x, lam^2 t) = lam^{-3} K_ij(x, t) in three dimensions
        let x = [x0, x1, x2];
        let y = [lam * x0, lam * x1, lam * x2];
        let a = oseen_kij(0, 2, &y, lam * lam * t).unwrap();
        let b = oseen_kij(0, 2, &x, t).unwrap() / lam.powi(3);
        prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-6));
    }
}
