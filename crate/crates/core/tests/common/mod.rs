//! Reference computations shared by the integration tests. Kept independent
//! of the library's own special functions and quadrature.

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use swipt_sic::model::NetworkParams;

/// Double-exponential (exp-sinh) rule for `∫_0^∞ f(x) dx`.
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F) -> f64 {
    let h = 1.0 / 256.0;
    let half_width = 4.5;
    let steps = (half_width / h) as i64;
    let mut sum = 0.0;
    for k in -steps..=steps {
        let t = k as f64 * h;
        let x = (FRAC_PI_2 * t.sinh()).exp();
        let w = x * FRAC_PI_2 * t.cosh();
        let fx = f(x);
        if fx != 0.0 {
            sum += fx * w;
        }
    }
    sum * h
}

/// Log of the interference Laplace transform straight from its defining
/// integral, `−2πλ ∫_0^∞ s r / (1 + s + r^α) dr`.
pub fn log_laplace_by_quadrature(s: f64, lambda: f64, alpha: f64) -> f64 {
    -2.0 * std::f64::consts::PI * lambda * exp_sinh(|r| s * r / (1.0 + s + r.powf(alpha)))
}

/// Coverage with no interferers: the useful link alone against noise.
pub fn noise_only_coverage(p: &NetworkParams) -> f64 {
    let tau = 1.0 + p.d0().powf(p.alpha());
    let noise = p.sigma2() + p.sigma2_c() / p.v();
    (-p.theta() * tau * noise / p.p_t()).exp()
}

/// Average harvested energy written out directly.
pub fn energy_reference(p: &NetworkParams) -> f64 {
    let pi = std::f64::consts::PI;
    let tau = 1.0 + p.d0().powf(p.alpha());
    let mean_i = (2.0 / p.alpha()) * pi * pi * p.lambda() / (2.0 * pi / p.alpha()).sin();
    p.zeta() * (1.0 - p.v()) * p.p_t() * (1.0 / tau + mean_i)
}
