//! Closed-form and integral expressions for coverage and harvested energy.
//!
//! Interference at the typical receiver is `I = Σ hᵢ (1 + dᵢ^α)⁻¹` over a
//! PPP of density λ with unit-mean exponential fades. Its Laplace transform
//! restricted to interferers beyond distance `r` is
//! `exp(−2πλ ∫_r^∞ s x / (1 + s + x^α) dx)`; the integral ("interference
//! exponent") is what most functions here are built on.
//!
//! Coverage with SIC is assembled under the usual assumption that the
//! residual interference terms of successive stages are independent.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::model::{NetworkParams, SicConfig};
use crate::specfun::{
    csc, gauss_2f1_neg, integrate_semi_infinite_scaled, ln_gamma, QuadratureSpec, SpecfunError,
};

/// Probabilities may leave [0, 1] by at most this much before it is treated
/// as a bug rather than quadrature noise.
pub const PROBABILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error(transparent)]
    Numerical(#[from] SpecfunError),
    #[error("{what} = {value} is outside [0, 1] beyond tolerance")]
    ProbabilityOutOfRange { what: &'static str, value: f64 },
    #[error("invalid argument ({what}): {value}")]
    InvalidArgument { what: &'static str, value: f64 },
}

/// Per-stage coverage probabilities for one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageBreakdown {
    /// Coverage without SIC.
    pub pi_nc: f64,
    /// `pi_d[j-1]`: probability of decoding the j-th nearest interferer, j = 1..=n.
    pub pi_d: Vec<f64>,
    /// `pi_c[j]`: coverage after cancelling j interferers, j = 0..=n.
    pub pi_c: Vec<f64>,
    /// Coverage when up to n interferers may be cancelled.
    pub pi_sic: f64,
}

fn checked_probability(what: &'static str, value: f64) -> Result<f64, AnalyticError> {
    if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&value) {
        return Err(AnalyticError::ProbabilityOutOfRange { what, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// `exp(−(s/P_t)(σ² + σ_C²/v))`: probability that a unit-mean exponential
/// fade clears the thermal and conversion noise at threshold-scaled load `s`.
pub fn noise_factor(s: f64, params: &NetworkParams) -> f64 {
    (-s / params.p_t() * params.effective_noise()).exp()
}

/// `2πλ ∫₀^∞ s x / (1 + s + x^α) dx = (2π²λ/α) s (1+s)^(2/α−1) csc(2π/α)`.
pub fn interference_exponent_full(s: f64, params: &NetworkParams) -> f64 {
    let alpha = params.alpha();
    let lambda = params.lambda();
    if lambda == 0.0 || s == 0.0 {
        return 0.0;
    }
    2.0 / alpha * lambda * PI * PI * s * (1.0 + s).powf(2.0 / alpha - 1.0) * csc(2.0 * PI / alpha)
}

/// `2πλ ∫_r^∞ s x / (1 + s + x^α) dx` for `r >= 0`.
///
/// With `c = 1 + s` and `y = r^α / c`, the tail form
/// `s r^(2−α)/(α−2) · ₂F₁(1, 1−2/α; 2−2/α; −1/y)` is used when `y > 1`.
/// Otherwise the near part `s r²/(2c) · ₂F₁(1, 2/α; 1+2/α; −y)` is subtracted
/// from the full exponent, which stays finite as `r → 0`.
pub fn interference_exponent_outside(
    s: f64,
    r: f64,
    params: &NetworkParams,
) -> Result<f64, AnalyticError> {
    if !(s >= 0.0) {
        return Err(AnalyticError::InvalidArgument {
            what: "Laplace argument must be >= 0",
            value: s,
        });
    }
    if !(r >= 0.0) {
        return Err(AnalyticError::InvalidArgument {
            what: "distance must be >= 0",
            value: r,
        });
    }
    let lambda = params.lambda();
    if lambda == 0.0 || s == 0.0 {
        return Ok(0.0);
    }
    if r == 0.0 {
        return Ok(interference_exponent_full(s, params));
    }
    let alpha = params.alpha();
    let c = 1.0 + s;
    let y = r.powf(alpha) / c;
    if y > 1.0 {
        let b = 1.0 - 2.0 / alpha;
        let f = gauss_2f1_neg(1.0, b, b + 1.0, -1.0 / y)?;
        Ok(2.0 * PI * lambda * s * r.powf(2.0 - alpha) / (alpha - 2.0) * f)
    } else {
        let b = 2.0 / alpha;
        let near = 2.0 * PI * lambda * s * r * r / (2.0 * c) * gauss_2f1_neg(1.0, b, b + 1.0, -y)?;
        Ok((interference_exponent_full(s, params) - near).max(0.0))
    }
}

/// Laplace transform of the aggregate interference, `E[exp(−s I₀)]`.
pub fn laplace_interference_full(s: f64, params: &NetworkParams) -> f64 {
    (-interference_exponent_full(s, params)).exp()
}

/// Laplace transform of the interference from nodes farther than `r`.
pub fn laplace_interference_outside(
    s: f64,
    r: f64,
    params: &NetworkParams,
) -> Result<f64, AnalyticError> {
    if !(r > 0.0) {
        return Err(AnalyticError::InvalidArgument {
            what: "distance must be > 0 (use laplace_interference_full at r = 0)",
            value: r,
        });
    }
    Ok((-interference_exponent_outside(s, r, params)?).exp())
}

/// Coverage probability of a receiver that does not apply SIC.
pub fn coverage_no_sic(params: &NetworkParams) -> f64 {
    let s = params.theta() * params.tau();
    noise_factor(s, params) * laplace_interference_full(s, params)
}

fn ln_unit_pdf(t: f64, n: u32) -> f64 {
    let nf = n as f64;
    std::f64::consts::LN_2 + (2.0 * nf - 1.0) * t.ln() - t * t - ln_gamma(nf)
}

// exp(x) underflows to zero below this.
const LN_UNDERFLOW: f64 = -745.0;

/// Integrates `g(r)·f(r, n)` over the n-th neighbour distance, where `ln_g`
/// is supplied in log form. Works in `t = r√(πλ)` so the integrand has unit
/// scale for any density.
fn integrate_over_nth_distance<G>(
    params: &NetworkParams,
    n: u32,
    spec: &QuadratureSpec,
    ln_g: G,
) -> Result<f64, AnalyticError>
where
    G: Fn(f64) -> Result<f64, AnalyticError>,
{
    let unit = (PI * params.lambda()).sqrt();
    let integrand = |t: f64| {
        if t <= 0.0 || !t.is_finite() {
            return 0.0;
        }
        let ln_pdf = ln_unit_pdf(t, n);
        if ln_pdf < LN_UNDERFLOW {
            return 0.0;
        }
        match ln_g(t / unit) {
            Ok(lg) => {
                let total = ln_pdf + lg;
                if total < LN_UNDERFLOW {
                    0.0
                } else {
                    total.exp()
                }
            }
            Err(_) => f64::NAN,
        }
    };
    let result = integrate_semi_infinite_scaled(integrand, 0.0, (n as f64).sqrt(), spec)?;
    Ok(result.value)
}

fn require_positive_index(n: usize) -> Result<u32, AnalyticError> {
    if n == 0 {
        return Err(AnalyticError::InvalidArgument {
            what: "interferer index must be >= 1",
            value: 0.0,
        });
    }
    u32::try_from(n).map_err(|_| AnalyticError::InvalidArgument {
        what: "interferer index too large",
        value: n as f64,
    })
}

/// Probability of decoding the n-th nearest interferer while the useful
/// signal and every farther interferer act as interference.
pub fn coverage_decode_nth(params: &NetworkParams, n: usize) -> Result<f64, AnalyticError> {
    coverage_decode_nth_with(params, n, &QuadratureSpec::default())
}

pub fn coverage_decode_nth_with(
    params: &NetworkParams,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    let n = require_positive_index(n)?;
    if params.lambda() == 0.0 {
        // no n-th interferer exists
        return Ok(0.0);
    }
    let theta = params.theta();
    let tau = params.tau();
    let alpha = params.alpha();
    let noise = params.effective_noise() / params.p_t();
    let value = integrate_over_nth_distance(params, n, spec, |r| {
        let xi = 1.0 + r.powf(alpha);
        let s = theta * xi;
        if !s.is_finite() {
            return Ok(f64::NEG_INFINITY);
        }
        let noise_term = s * noise;
        let useful_term = (s / tau).ln_1p();
        if -(noise_term + useful_term) < LN_UNDERFLOW {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(-(noise_term + useful_term + interference_exponent_outside(s, r, params)?))
    })?;
    checked_probability("decode probability", value)
}

/// `∫ f(r, n) · L_{I_n}(θτ | r) dr`, the part of the post-cancellation
/// coverage that does not depend on the split ratio.
pub fn cancel_interference_term(
    params: &NetworkParams,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    let n = require_positive_index(n)?;
    if params.lambda() == 0.0 {
        return Ok(1.0);
    }
    let s = params.theta() * params.tau();
    integrate_over_nth_distance(params, n, spec, |r| {
        Ok(-interference_exponent_outside(s, r, params)?)
    })
}

/// Coverage probability of the useful signal once the n nearest
/// interferers have been cancelled. `n = 0` is exactly [`coverage_no_sic`].
pub fn coverage_after_cancel(params: &NetworkParams, n: usize) -> Result<f64, AnalyticError> {
    coverage_after_cancel_with(params, n, &QuadratureSpec::default())
}

pub fn coverage_after_cancel_with(
    params: &NetworkParams,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    if n == 0 {
        return Ok(coverage_no_sic(params));
    }
    let s = params.theta() * params.tau();
    let value = noise_factor(s, params) * cancel_interference_term(params, n, spec)?;
    checked_probability("post-cancellation coverage", value)
}

/// Combines per-stage probabilities into the SIC coverage:
/// `Π_NC + Σ_{i=1}^{n} [Π_{j<i} (1 − Π_C(j))] · [Π_{j=1}^{i} Π_D(j)] · Π_C(i)`.
pub fn compose_sic(pi_d: &[f64], pi_c: &[f64]) -> f64 {
    debug_assert_eq!(pi_c.len(), pi_d.len() + 1);
    let mut total = pi_c[0];
    let mut all_failed = 1.0;
    let mut all_decoded = 1.0;
    for i in 1..pi_c.len() {
        all_failed *= 1.0 - pi_c[i - 1];
        all_decoded *= pi_d[i - 1];
        total += all_failed * all_decoded * pi_c[i];
    }
    total
}

/// Coverage of a receiver that cancels up to `sic.n_max` interferers, with
/// every intermediate term.
pub fn coverage_sic(
    params: &NetworkParams,
    sic: &SicConfig,
) -> Result<CoverageBreakdown, AnalyticError> {
    coverage_sic_with(params, sic, &QuadratureSpec::default())
}

pub fn coverage_sic_with(
    params: &NetworkParams,
    sic: &SicConfig,
    spec: &QuadratureSpec,
) -> Result<CoverageBreakdown, AnalyticError> {
    let pi_nc = coverage_no_sic(params);
    let mut pi_d = Vec::with_capacity(sic.n_max);
    let mut pi_c = Vec::with_capacity(sic.n_max + 1);
    pi_c.push(pi_nc);
    for j in 1..=sic.n_max {
        pi_d.push(coverage_decode_nth_with(params, j, spec)?);
        pi_c.push(coverage_after_cancel_with(params, j, spec)?);
    }
    let pi_sic = checked_probability("SIC coverage", compose_sic(&pi_d, &pi_c))?;
    Ok(CoverageBreakdown {
        pi_nc,
        pi_d,
        pi_c,
        pi_sic,
    })
}

/// Mean aggregate interference `E[I₀] = (2/α) π² λ csc(2π/α)`.
pub fn mean_interference(params: &NetworkParams) -> f64 {
    let alpha = params.alpha();
    2.0 / alpha * PI * PI * params.lambda() * csc(2.0 * PI / alpha)
}

/// Which limit the energy upper bound is taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyBound {
    /// v → 0: all received power goes to the harvester.
    FullSplit,
    /// v → 0 and d0 → 0 (τ → 1).
    FullSplitZeroDistance,
}

/// Harvested energy with the whole received signal rectified.
pub fn harvested_energy_upper_bound(params: &NetworkParams, bound: EnergyBound) -> f64 {
    let direct = match bound {
        EnergyBound::FullSplit => 1.0 / params.tau(),
        EnergyBound::FullSplitZeroDistance => 1.0,
    };
    params.zeta() * params.p_t() * (direct + mean_interference(params))
}

/// Average harvested energy `ζ(1 − v) P_t (τ⁻¹ + E[I₀])`. Noise is not
/// harvested.
pub fn avg_harvested_energy(params: &NetworkParams) -> f64 {
    (1.0 - params.v()) * harvested_energy_upper_bound(params, EnergyBound::FullSplit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::integrate_semi_infinite;

    fn defaults() -> NetworkParams {
        NetworkParams::default()
    }

    fn tight() -> QuadratureSpec {
        QuadratureSpec {
            rel_tol: 1e-12,
            abs_tol: 0.0,
            max_subdivisions: 5000,
        }
    }

    /// 2πλ ∫_r^∞ s x/(1+s+x^α) dx by direct quadrature.
    fn exponent_by_quadrature(s: f64, r: f64, p: &NetworkParams) -> f64 {
        let alpha = p.alpha();
        let scale = (1.0 + s).powf(1.0 / alpha).max(1.0);
        2.0 * PI
            * p.lambda()
            * integrate_semi_infinite_scaled(
                |x| s * x / (1.0 + s + x.powf(alpha)),
                r,
                scale,
                &tight(),
            )
            .unwrap()
            .value
    }

    #[test]
    fn laplace_full_examples() {
        let p = defaults();
        assert_eq!(laplace_interference_full(0.0, &p), 1.0);
        let l = laplace_interference_full(3162.6, &p);
        assert!((interference_exponent_full(3162.6, &p) - 0.2775).abs() < 1e-4);
        assert!((l - 0.7578).abs() < 2e-4);
        assert!((l - (-0.27748f64).exp()).abs() < 1e-5);
        let empty = p.to_builder().lambda(0.0).build().unwrap();
        assert_eq!(laplace_interference_full(1e4, &empty), 1.0);
    }

    #[test]
    fn laplace_outside_examples() {
        let p = defaults();
        assert_eq!(laplace_interference_outside(0.0, 5.0, &p).unwrap(), 1.0);
        assert!((laplace_interference_outside(1.0, 1e6, &p).unwrap() - 1.0).abs() < 1e-6);
        let oracle = exponent_by_quadrature(1.0, 1.0, &p);
        let ours = laplace_interference_outside(1.0, 1.0, &p).unwrap();
        assert!((ours - (-oracle).exp()).abs() < 1e-8);
        assert!(laplace_interference_outside(1.0, 0.0, &p).is_err());
    }

    #[test]
    fn outside_exponent_matches_quadrature_on_both_branches() {
        // α < 3 leaves an endpoint singularity after the [0, 1) map, which
        // the oracle quadrature does not resolve to 1e-9.
        for alpha in [3.0, 4.0, 6.0] {
            let p = defaults().to_builder().alpha(alpha).build().unwrap();
            for s in [0.1, 1.0, 316.0, 3162.6, 1e6] {
                for r in [1e-3, 0.5, 1.0, 3.0, 10.0, 40.0, 300.0] {
                    let oracle = exponent_by_quadrature(s, r, &p);
                    let ours = interference_exponent_outside(s, r, &p).unwrap();
                    assert!(
                        (ours - oracle).abs() <= 1e-9 * oracle.max(1e-12),
                        "alpha={alpha} s={s} r={r}: {ours} vs {oracle}"
                    );
                }
            }
        }
    }

    #[test]
    fn outside_tends_to_full_at_origin() {
        for alpha in [3.0, 4.0, 6.0] {
            let p = defaults().to_builder().alpha(alpha).build().unwrap();
            for s in [0.1, 1.0, 3162.6] {
                let near = laplace_interference_outside(s, 1e-3, &p).unwrap();
                assert!((near - laplace_interference_full(s, &p)).abs() < 1e-4);
                assert_eq!(
                    interference_exponent_outside(s, 0.0, &p).unwrap(),
                    interference_exponent_full(s, &p)
                );
            }
        }
    }

    #[test]
    fn no_sic_examples() {
        let p = defaults();
        let s = p.theta() * p.tau();
        assert!((s / p.p_t() * 3.0 - 0.09488).abs() < 1e-5);
        let pnc = coverage_no_sic(&p);
        assert!((pnc - (-0.09488f64 - 0.2775).exp()).abs() < 2e-4);
        assert!((pnc - 0.689).abs() < 1e-3);

        let tiny = p.to_builder().theta(1e-300).build().unwrap();
        assert!((coverage_no_sic(&tiny) - 1.0).abs() < 1e-12);
        let quiet = p
            .to_builder()
            .lambda(0.0)
            .sigma2(0.0)
            .sigma2_c(0.0)
            .build()
            .unwrap();
        assert_eq!(coverage_no_sic(&quiet), 1.0);
    }

    #[test]
    fn decode_nth_examples() {
        let p = defaults();
        // integrand factor at r = 0
        let factor = 1.0 / (1.0 + p.theta() / p.tau());
        assert!((factor - 0.99997).abs() < 1e-5);

        let sparse = p.to_builder().lambda(1e-9).build().unwrap();
        assert!(coverage_decode_nth(&sparse, 1).unwrap() < 1e-3);
        let d1 = coverage_decode_nth(&p, 1).unwrap();
        assert!(d1 > 0.0 && d1 < 1.0);
        assert!(coverage_decode_nth(&p, 0).is_err());
    }

    #[test]
    fn decode_nth_matches_direct_double_integral() {
        // Independent route: evaluate the tail exponent by quadrature inside
        // the outer integral over r (in the original distance variable).
        let p = defaults();
        let theta = p.theta();
        let tau = p.tau();
        let lambda = p.lambda();
        let noise = p.effective_noise() / p.p_t();
        let outer = QuadratureSpec {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_subdivisions: 5000,
        };
        for n in 1..=2u32 {
            let oracle = integrate_semi_infinite_scaled(
                |r| {
                    if r == 0.0 {
                        return 0.0;
                    }
                    let xi = 1.0 + r.powi(4);
                    let s = theta * xi;
                    let pdf = crate::specfun::nn_distance_pdf(r, n, lambda).unwrap();
                    if pdf == 0.0 {
                        return 0.0;
                    }
                    let tail = exponent_by_quadrature(s, r, &p);
                    pdf / (1.0 + s / tau) * (-s * noise - tail).exp()
                },
                0.0,
                20.0,
                &outer,
            )
            .unwrap()
            .value;
            let ours = coverage_decode_nth(&p, n as usize).unwrap();
            assert!((ours - oracle).abs() < 1e-8, "n={n}: {ours} vs {oracle}");
        }
    }

    #[test]
    fn after_cancel_examples() {
        let p = defaults();
        assert_eq!(coverage_after_cancel(&p, 0).unwrap(), coverage_no_sic(&p));
        let c1 = coverage_after_cancel(&p, 1).unwrap();
        assert!(c1 >= coverage_after_cancel(&p, 0).unwrap());

        let sparse = p.to_builder().lambda(1e-9).build().unwrap();
        let noise_only = noise_factor(p.theta() * p.tau(), &p);
        let c = coverage_after_cancel(&sparse, 1).unwrap();
        assert!(c <= noise_only && noise_only - c < 1e-3);
    }

    #[test]
    fn sic_examples() {
        let p = defaults();
        let b0 = coverage_sic(&p, &SicConfig::new(0)).unwrap();
        assert_eq!(b0.pi_sic, coverage_no_sic(&p));
        assert!(b0.pi_d.is_empty());

        let b1 = coverage_sic(&p, &SicConfig::new(1)).unwrap();
        assert!(b1.pi_sic > b1.pi_nc);
        let d1 = coverage_decode_nth(&p, 1).unwrap();
        let c1 = coverage_after_cancel(&p, 1).unwrap();
        let increment = (1.0 - b1.pi_nc) * d1 * c1;
        assert!((b1.pi_sic - b1.pi_nc - increment).abs() < 1e-15);

        let b2 = coverage_sic(&p, &SicConfig::new(2)).unwrap();
        let b3 = coverage_sic(&p, &SicConfig::new(3)).unwrap();
        assert!(b3.pi_sic - b2.pi_sic < b2.pi_sic - b1.pi_sic);
        // same prefix terms regardless of depth
        assert_eq!(b3.pi_c[..2], b1.pi_c[..]);
        assert_eq!(b3.pi_c[0], b3.pi_nc);
    }

    #[test]
    fn sic_reference_values() {
        // Values from an independent scipy implementation (hyp2f1 + quad).
        let p = defaults();
        let b = coverage_sic(&p, &SicConfig::new(3)).unwrap();
        let close = |a: f64, b: f64| (a - b).abs() < 1e-8;
        assert!(close(b.pi_nc, 0.689_111_530_738_567_7));
        assert!(close(b.pi_d[0], 0.346_129_423_269_598_45));
        assert!(close(b.pi_d[1], 0.094_007_789_395_420_16));
        assert!(close(b.pi_c[1], 0.848_880_807_156_392_6));
        assert!(close(b.pi_c[2], 0.884_963_417_719_092_1));
        assert!(close(b.pi_sic, 0.781_814_017_231_309_7));
    }

    #[test]
    fn energy_examples() {
        let p = defaults();
        let mi = mean_interference(&p);
        assert!((mi - PI * PI * 1e-3 / 2.0).abs() < 1e-15);
        let oracle = 2.0
            * PI
            * 1e-3
            * integrate_semi_infinite(|r| r / (1.0 + r.powi(4)), 0.0, &tight())
                .unwrap()
                .value;
        assert!((mi / oracle - 1.0).abs() < 1e-10);
        let empty = p.to_builder().lambda(0.0).build().unwrap();
        assert_eq!(mean_interference(&empty), 0.0);
        let dense = p.to_builder().lambda(2e-3).build().unwrap();
        assert!((mean_interference(&dense) - 2.0 * mi).abs() < 1e-15);

        let e = avg_harvested_energy(&p);
        assert!((e - 0.5 * 1e5 * (9.999e-5 + 4.9348e-3)).abs() < 0.01);
        assert!((e - 251.7).abs() < 0.05);
        assert_eq!(avg_harvested_energy(&p.with_v(1.0).unwrap()), 0.0);
        let single = avg_harvested_energy(&empty);
        assert!((single - 0.5 * 1e5 / 10001.0).abs() < 1e-12);

        let ub = harvested_energy_upper_bound(&p, EnergyBound::FullSplit);
        assert!((ub - 503.5).abs() < 0.1);
        assert_eq!(ub * 0.5, e);
        let single_link = empty.to_builder().d0(1e-9).build().unwrap();
        assert_eq!(
            harvested_energy_upper_bound(&single_link, EnergyBound::FullSplitZeroDistance),
            p.p_t()
        );
    }
}
