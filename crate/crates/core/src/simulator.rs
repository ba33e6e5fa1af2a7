//! Seeded Monte Carlo engine for the SIC receiver.
//!
//! Each trial draws a fresh PPP of interferers on a disc around the typical
//! receiver, runs the cancellation protocol and records whether the useful
//! signal was decoded and how much energy was harvested. Trial `i` always uses
//! ChaCha stream `i` of `master_seed`, so results do not depend on how trials
//! are batched or scheduled.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::mean_interference;
use crate::model::{NetworkParams, Ordering, SicConfig};

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

/// Relative truncation budget for the automatic window.
const TRUNCATION_BUDGET: f64 = 1e-4;

/// Upper limit on the expected interferer count in an automatic window.
pub const MAX_EXPECTED_INTERFERERS: f64 = 5e4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WindowRadius {
    /// Chosen from the parameters so that truncation bias is negligible;
    /// see [`auto_window_radius`].
    #[default]
    Auto,
    Explicit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub trials: u64,
    pub window_radius: WindowRadius,
    pub master_seed: u64,
    /// Consecutive trials per parallel work item. Does not affect results.
    pub batch_size: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            trials: 100_000,
            window_radius: WindowRadius::Auto,
            master_seed: 1,
            batch_size: 4096,
        }
    }
}

impl SimConfig {
    pub fn validate(&self, params: &NetworkParams) -> Result<(), SimError> {
        if self.trials < 1 {
            return Err(SimError::InvalidConfig("trials must be >= 1".into()));
        }
        if self.batch_size < 1 {
            return Err(SimError::InvalidConfig("batch_size must be >= 1".into()));
        }
        if let WindowRadius::Explicit(r) = self.window_radius {
            if !(r > params.d0() && r.is_finite()) {
                return Err(SimError::InvalidConfig(format!(
                    "window radius {r} must be finite and exceed d0 = {}",
                    params.d0()
                )));
            }
        }
        Ok(())
    }

    pub fn radius(&self, params: &NetworkParams) -> f64 {
        match self.window_radius {
            WindowRadius::Auto => auto_window_radius(params).radius,
            WindowRadius::Explicit(r) => r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutoWindow {
    pub radius: f64,
    /// The radius was limited by [`MAX_EXPECTED_INTERFERERS`] and the
    /// truncation budget is not met.
    pub capped: bool,
}

/// Disc radius `R` such that the interference beyond `R` is negligible for
/// both estimators:
///
/// * energy: `2πλ ∫_R^∞ r/(1+r^α) dr < 1e-4 · E[I₀]`;
/// * coverage: the same tail scaled by the Laplace argument `θτ` stays below
///   `1e-4`, bounding the bias of `ln P[SINR ≥ θ]`.
///
/// The tail integral is bounded by `R^(2−α)/(α−2)`.
pub fn auto_window_radius(params: &NetworkParams) -> AutoWindow {
    let floor = (2.0 * params.d0()).max(1.0);
    let lambda = params.lambda();
    if lambda == 0.0 {
        return AutoWindow {
            radius: floor,
            capped: false,
        };
    }
    let alpha = params.alpha();
    let excess = alpha - 2.0;
    // R^(2−α) < bound  ⇔  R > bound^(−1/(α−2))
    let radius_for = |bound: f64| bound.powf(-1.0 / excess);
    let energy_bound = TRUNCATION_BUDGET * excess * mean_interference(params) / (2.0 * PI * lambda);
    let coverage_bound =
        TRUNCATION_BUDGET * excess / (2.0 * PI * lambda * params.theta() * params.tau());
    let wanted = radius_for(energy_bound)
        .max(radius_for(coverage_bound))
        .max(floor);
    let cap = (MAX_EXPECTED_INTERFERERS / (PI * lambda)).sqrt();
    if wanted > cap {
        AutoWindow {
            radius: cap.max(floor),
            capped: true,
        }
    } else {
        AutoWindow {
            radius: wanted,
            capped: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interferer {
    pub distance: f64,
    pub fade: f64,
}

/// One snapshot of the network seen from the typical receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    /// Power fade of the useful link.
    pub useful_fade: f64,
    pub interferers: Vec<Interferer>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TerminalState {
    /// Useful signal decoded after `k` cancellations.
    Success(usize),
    /// All `n_max` cancellations spent without decoding the useful signal.
    OutageAfterN,
    /// Decoding the next interferer failed (or none was left to decode).
    OutageDecodeFailed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub decoded: bool,
    pub cancels_used: usize,
    pub terminal_state: TerminalState,
    /// `ζ(1−v)P_t(h₀τ⁻¹ + I₀)`, always with the full pre-cancellation
    /// interference.
    pub harvested_sample: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub trials: u64,
    pub seed: u64,
}

impl SimEstimate {
    fn from_moments(mean: f64, variance: f64, trials: u64, seed: u64) -> Self {
        let std_error = (variance.max(0.0) / trials as f64).sqrt();
        SimEstimate {
            mean,
            std_error,
            ci95_low: mean - Z_95 * std_error,
            ci95_high: mean + Z_95 * std_error,
            trials,
            seed,
        }
    }

    /// Estimate of a mean from samples listed in trial order.
    pub fn from_samples(samples: &[f64], seed: u64) -> Self {
        let n = samples.len() as u64;
        assert!(n > 0, "at least one sample required");
        let mean = samples.iter().sum::<f64>() / n as f64;
        let variance = if n > 1 {
            samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self::from_moments(mean, variance, n, seed)
    }

    /// Estimate of a probability from a success count.
    pub fn from_count(successes: u64, trials: u64, seed: u64) -> Self {
        assert!(trials > 0, "at least one trial required");
        let p = successes as f64 / trials as f64;
        let variance = if trials > 1 {
            p * (1.0 - p) * trials as f64 / (trials - 1) as f64
        } else {
            0.0
        };
        Self::from_moments(p, variance, trials, seed)
    }

    /// |x − mean| in units of the standard error (infinite when the error is
    /// zero and x differs from the mean).
    pub fn z_score(&self, x: f64) -> f64 {
        let d = (x - self.mean).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

fn trial_rng(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial_index);
    rng
}

fn draw_realization<R: Rng>(lambda: f64, radius: f64, rng: &mut R) -> Realization {
    let useful_fade: f64 = Exp1.sample(rng);
    let mean_count = lambda * PI * radius * radius;
    let count = if mean_count > 0.0 {
        let poisson = Poisson::new(mean_count).expect("finite positive Poisson mean");
        poisson.sample(rng) as usize
    } else {
        0
    };
    let interferers = (0..count)
        .map(|_| {
            // 1 − U lies in (0, 1], so distances are in (0, R]
            let u: f64 = 1.0 - rng.random::<f64>();
            let fade: f64 = Exp1.sample(rng);
            Interferer {
                distance: radius * u.sqrt(),
                fade,
            }
        })
        .collect();
    Realization {
        useful_fade,
        interferers,
    }
}

/// Draws the realization for `trial_index`. Deterministic in
/// `(cfg.master_seed, trial_index)`.
pub fn sample_realization(
    params: &NetworkParams,
    cfg: &SimConfig,
    trial_index: u64,
) -> Realization {
    let mut rng = trial_rng(cfg.master_seed, trial_index);
    draw_realization(params.lambda(), cfg.radius(params), &mut rng)
}

fn path_gain(distance: f64, alpha: f64) -> f64 {
    let d_alpha = if alpha == 4.0 {
        let d2 = distance * distance;
        d2 * d2
    } else {
        distance.powf(alpha)
    };
    1.0 / (1.0 + d_alpha)
}

/// Runs the SIC decoding chain on one realization:
///
/// 1. try the useful signal against the current interference; success ends
///    the trial;
/// 2. otherwise, if fewer than `n_max` interferers have been removed, try the
///    next interferer in the configured order, with the useful signal counted
///    as interference; failure is an outage, success removes it exactly and
///    the chain returns to 1.
pub fn run_sic_protocol(
    real: &Realization,
    params: &NetworkParams,
    sic: &SicConfig,
) -> TrialOutcome {
    let alpha = params.alpha();
    let v = params.v();
    let p_t = params.p_t();
    let theta = params.theta();
    let (sigma2, sigma2_c) = (params.sigma2(), params.sigma2_c());
    let sinr = |signal: f64, interference: f64| {
        v * p_t * signal / (v * (sigma2 + p_t * interference) + sigma2_c)
    };

    let useful = real.useful_fade / params.tau();
    // (ordering key, received power)
    let mut received: Vec<(f64, f64)> = real
        .interferers
        .iter()
        .map(|i| {
            let power = i.fade * path_gain(i.distance, alpha);
            let key = match sic.ordering {
                Ordering::ByDistance => i.distance,
                Ordering::ByInstantaneousPower => -power,
            };
            (key, power)
        })
        .collect();
    let total: f64 = received.iter().map(|&(_, p)| p).sum();
    let harvested_sample = params.zeta() * (1.0 - v) * p_t * (useful + total);

    let candidates = sic.n_max.min(received.len());
    if candidates > 0 && candidates < received.len() {
        received.select_nth_unstable_by(candidates - 1, |a, b| a.0.total_cmp(&b.0));
    }
    received[..candidates].sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    let mut interference = total;
    let mut k = 0;
    let terminal_state = loop {
        if sinr(useful, interference) >= theta {
            break TerminalState::Success(k);
        }
        if k == sic.n_max {
            break TerminalState::OutageAfterN;
        }
        let Some(&(_, power)) = received.get(k).filter(|_| k < candidates) else {
            break TerminalState::OutageDecodeFailed;
        };
        let rest = (interference - power).max(0.0);
        if sinr(power, rest + useful) < theta {
            break TerminalState::OutageDecodeFailed;
        }
        interference = rest;
        k += 1;
    };

    let decoded = matches!(terminal_state, TerminalState::Success(_));
    TrialOutcome {
        decoded,
        cancels_used: k,
        terminal_state,
        harvested_sample,
    }
}

fn run_trials<T, F>(
    params: &NetworkParams,
    cfg: &SimConfig,
    per_trial: F,
) -> Result<Vec<T>, SimError>
where
    T: Send,
    F: Fn(Realization) -> T + Sync,
{
    cfg.validate(params)?;
    let radius = cfg.radius(params);
    let lambda = params.lambda();
    let seed = cfg.master_seed;
    let batch = cfg.batch_size as u64;
    let batches: Vec<Vec<T>> = (0..cfg.trials.div_ceil(batch))
        .into_par_iter()
        .map(|b| {
            (b * batch..((b + 1) * batch).min(cfg.trials))
                .map(|i| {
                    let mut rng = trial_rng(seed, i);
                    per_trial(draw_realization(lambda, radius, &mut rng))
                })
                .collect()
        })
        .collect();
    Ok(batches.into_iter().flatten().collect())
}

/// Coverage estimates for every cancellation depth `0..=sic.n_max`, all from
/// the same trials. `estimates[n]` is monotone in `n` by construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageProfile {
    pub estimates: Vec<SimEstimate>,
    /// Trials that ended in each terminal state.
    pub outage_after_n: u64,
    pub outage_decode_failed: u64,
}

pub fn estimate_coverage_profile(
    params: &NetworkParams,
    sic: &SicConfig,
    cfg: &SimConfig,
) -> Result<CoverageProfile, SimError> {
    let states = run_trials(params, cfg, |real| {
        run_sic_protocol(&real, params, sic).terminal_state
    })?;
    let mut success_at = vec![0u64; sic.n_max + 1];
    let mut outage_after_n = 0;
    let mut outage_decode_failed = 0;
    for state in &states {
        match *state {
            TerminalState::Success(k) => success_at[k] += 1,
            TerminalState::OutageAfterN => outage_after_n += 1,
            TerminalState::OutageDecodeFailed => outage_decode_failed += 1,
        }
    }
    let mut cumulative = 0;
    let estimates = success_at
        .iter()
        .map(|&c| {
            cumulative += c;
            SimEstimate::from_count(cumulative, cfg.trials, cfg.master_seed)
        })
        .collect();
    Ok(CoverageProfile {
        estimates,
        outage_after_n,
        outage_decode_failed,
    })
}

/// Estimated probability that the useful signal is decoded with up to
/// `sic.n_max` cancellations.
pub fn estimate_coverage(
    params: &NetworkParams,
    sic: &SicConfig,
    cfg: &SimConfig,
) -> Result<SimEstimate, SimError> {
    let profile = estimate_coverage_profile(params, sic, cfg)?;
    Ok(*profile.estimates.last().expect("depth 0 always present"))
}

/// Estimated average harvested energy.
pub fn estimate_energy(params: &NetworkParams, cfg: &SimConfig) -> Result<SimEstimate, SimError> {
    let alpha = params.alpha();
    let scale = params.zeta() * (1.0 - params.v()) * params.p_t();
    let tau = params.tau();
    let samples = run_trials(params, cfg, |real| {
        let interference: f64 = real
            .interferers
            .iter()
            .map(|i| i.fade * path_gain(i.distance, alpha))
            .sum();
        scale * (real.useful_fade / tau + interference)
    })?;
    Ok(SimEstimate::from_samples(&samples, cfg.master_seed))
}
