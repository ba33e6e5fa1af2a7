//! Special functions and quadrature used by the analytic expressions.

mod gamma;
mod hypergeometric;
mod quadrature;

use std::f64::consts::PI;

use thiserror::Error;

pub use gamma::{gamma, ln_gamma, recip_gamma};
pub use hypergeometric::gauss_2f1_neg;
pub use quadrature::{
    integrate, integrate_semi_infinite, integrate_semi_infinite_scaled, Integral, QuadratureSpec,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecfunError {
    #[error("invalid argument ({what}): {value}")]
    InvalidArgument { what: &'static str, value: f64 },
    #[error("2F1 evaluated at z = {z} > 0, outside the supported domain")]
    OutOfDomain { z: f64 },
    #[error("2F1 parameter c = {c} is a non-positive integer")]
    PoleInC { c: f64 },
    #[error("hypergeometric series at z = {z} did not converge within {terms} terms")]
    SeriesNotConverged { z: f64, terms: usize },
    #[error("integrand is not finite at x = {x} (value {value})")]
    NonFiniteIntegrand { x: f64, value: f64 },
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {estimate}, error {abs_error})"
    )]
    QuadratureNotConverged {
        subdivisions: usize,
        estimate: f64,
        abs_error: f64,
    },
}

/// Cosecant.
pub fn csc(x: f64) -> f64 {
    1.0 / x.sin()
}

/// Density of the distance from the origin to the n-th nearest point of a
/// planar PPP with density `lambda`:
/// `f(r, n) = 2(πλ)ⁿ / Γ(n) · r^(2n−1) · exp(−πλr²)`.
pub fn nn_distance_pdf(r: f64, n: u32, lambda: f64) -> Result<f64, SpecfunError> {
    if n == 0 {
        return Err(SpecfunError::InvalidArgument {
            what: "neighbour index n must be >= 1",
            value: 0.0,
        });
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(SpecfunError::InvalidArgument {
            what: "density must be positive",
            value: lambda,
        });
    }
    if !(r >= 0.0) {
        return Err(SpecfunError::InvalidArgument {
            what: "distance must be non-negative",
            value: r,
        });
    }
    let scale = (PI * lambda).sqrt();
    Ok(scale * nn_distance_pdf_unit(r * scale, n))
}

/// The same density in the dimensionless distance `t = r·√(πλ)`:
/// `2 t^(2n−1) e^(−t²) / Γ(n)`. Independent of the density.
pub fn nn_distance_pdf_unit(t: f64, n: u32) -> f64 {
    debug_assert!(n >= 1);
    if t == 0.0 {
        return 0.0;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let nf = n as f64;
    (std::f64::consts::LN_2 + (2.0 * nf - 1.0) * t.ln() - t * t - ln_gamma(nf)).exp()
}
