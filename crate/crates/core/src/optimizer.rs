//! Smallest power-splitting ratio that keeps SIC coverage above a target.
//!
//! Harvested energy is proportional to `1 − v`, so maximising it under
//! `Π_SIC(v, n) ≥ η` means finding the smallest feasible `v`.

use serde::Serialize;
use thiserror::Error;

use crate::analytic::{
    self, avg_harvested_energy, cancel_interference_term, compose_sic, coverage_decode_nth_with,
    coverage_no_sic, noise_factor, AnalyticError,
};
use crate::model::{ModelError, NetworkParams, SicConfig};
use crate::specfun::QuadratureSpec;

/// Lower end of the search range; the conversion-noise term `σ_C²/v`
/// diverges at zero.
pub const V_FLOOR: f64 = 1e-6;

/// Width of the final bisection bracket.
pub const V_TOLERANCE: f64 = 1e-9;

const GRID_POINTS: usize = 16;
const MONOTONE_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizeError {
    #[error("coverage target {0} must lie in [0, 1)")]
    InvalidTarget(f64),
    #[error("infeasible: coverage at v = 1 is {best_coverage}, below the target {eta}")]
    Infeasible { eta: f64, best_coverage: f64 },
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SplitDiagnostic {
    /// Coverage decreased somewhere on the coarse v-grid by `max_drop`, so
    /// bisection was replaced by grid refinement.
    NonMonotoneDetected { max_drop: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitSolution {
    pub v_star: f64,
    /// Average harvested energy at `v_star`.
    pub energy: f64,
    /// `Π_SIC(v_star, n)`, re-evaluated independently of the search.
    pub coverage_at_v_star: f64,
    /// The constraint binds (`Π_SIC(v_star) ≈ η`) rather than `v_star`
    /// sitting on the lower bound.
    pub constraint_active: bool,
    pub diagnostics: Vec<SplitDiagnostic>,
}

/// SIC coverage as a function of `v` with the split-independent integrals
/// computed once.
struct CoverageCurve<'a> {
    params: &'a NetworkParams,
    n_max: usize,
    cancel_terms: Vec<f64>,
    spec: QuadratureSpec,
}

impl<'a> CoverageCurve<'a> {
    fn new(params: &'a NetworkParams, sic: &SicConfig) -> Result<Self, OptimizeError> {
        let spec = QuadratureSpec::default();
        let cancel_terms = (1..=sic.n_max)
            .map(|j| cancel_interference_term(params, j, &spec))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CoverageCurve {
            params,
            n_max: sic.n_max,
            cancel_terms,
            spec,
        })
    }

    fn at(&self, v: f64) -> Result<f64, OptimizeError> {
        let p = self.params.with_v(v)?;
        let s = p.theta() * p.tau();
        let noise = noise_factor(s, &p);
        let mut pi_c = Vec::with_capacity(self.n_max + 1);
        pi_c.push(coverage_no_sic(&p));
        pi_c.extend(self.cancel_terms.iter().map(|k| (noise * k).min(1.0)));
        let pi_d = (1..=self.n_max)
            .map(|j| coverage_decode_nth_with(&p, j, &self.spec))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(compose_sic(&pi_d, &pi_c).clamp(0.0, 1.0))
    }
}

fn solution(
    params: &NetworkParams,
    sic: &SicConfig,
    v_star: f64,
    constraint_active: bool,
    diagnostics: Vec<SplitDiagnostic>,
) -> Result<SplitSolution, OptimizeError> {
    let at_star = params.with_v(v_star)?;
    let coverage = analytic::coverage_sic(&at_star, sic)?.pi_sic;
    Ok(SplitSolution {
        v_star,
        energy: avg_harvested_energy(&at_star),
        coverage_at_v_star: coverage,
        constraint_active,
        diagnostics,
    })
}

/// Without SIC the coverage `A·exp(−θτσ_C²/(P_t v))` inverts in closed form.
fn solve_without_sic(params: &NetworkParams, eta: f64) -> Result<(f64, bool), OptimizeError> {
    let s = params.theta() * params.tau();
    let v_free = (-s * params.sigma2() / params.p_t()).exp()
        * analytic::laplace_interference_full(s, params);
    let at_one = coverage_no_sic(&params.with_v(1.0)?);
    if at_one < eta {
        return Err(OptimizeError::Infeasible {
            eta,
            best_coverage: at_one,
        });
    }
    if params.sigma2_c() == 0.0 {
        return Ok((V_FLOOR, false));
    }
    let v = s * params.sigma2_c() / (params.p_t() * (v_free / eta).ln());
    if v <= V_FLOOR {
        Ok((V_FLOOR, false))
    } else {
        Ok((v.min(1.0), true))
    }
}

/// Smallest `v ∈ [V_FLOOR, 1]` with `Π_SIC(v, n) ≥ eta`.
///
/// `eta = 0` is accepted (no-SIC coverage underflows to zero at low
/// transmit power) and is met at [`V_FLOOR`].
///
/// A 16-point geometric grid brackets the root and checks that coverage is
/// nondecreasing in `v`; bisection then narrows the bracket to
/// [`V_TOLERANCE`]. If the grid shows a decrease, a grid-refinement search is
/// used instead and the solution carries
/// [`SplitDiagnostic::NonMonotoneDetected`].
pub fn optimal_split(
    params: &NetworkParams,
    sic: &SicConfig,
    eta: f64,
) -> Result<SplitSolution, OptimizeError> {
    if !(0.0..1.0).contains(&eta) {
        return Err(OptimizeError::InvalidTarget(eta));
    }
    if sic.n_max == 0 {
        let (v, active) = solve_without_sic(params, eta)?;
        return solution(params, sic, v, active, Vec::new());
    }

    let curve = CoverageCurve::new(params, sic)?;
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|k| {
            if k == GRID_POINTS - 1 {
                1.0
            } else {
                V_FLOOR.powf(1.0 - k as f64 / (GRID_POINTS - 1) as f64)
            }
        })
        .collect();
    let values = grid
        .iter()
        .map(|&v| curve.at(v))
        .collect::<Result<Vec<_>, _>>()?;

    let best = values[GRID_POINTS - 1];
    if best < eta {
        return Err(OptimizeError::Infeasible {
            eta,
            best_coverage: best,
        });
    }
    if values[0] >= eta {
        return solution(params, sic, V_FLOOR, false, Vec::new());
    }

    let max_drop = values
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(0.0f64, f64::max);
    let first = values
        .iter()
        .position(|&c| c >= eta)
        .expect("the last grid point is feasible");
    let (mut lo, mut hi) = (grid[first - 1], grid[first]);

    let mut diagnostics = Vec::new();
    if max_drop > MONOTONE_SLACK {
        diagnostics.push(SplitDiagnostic::NonMonotoneDetected { max_drop });
        while hi - lo > V_TOLERANCE {
            let step = (hi - lo) / (GRID_POINTS - 1) as f64;
            let mut next = None;
            for k in 1..GRID_POINTS {
                let v = if k == GRID_POINTS - 1 {
                    hi
                } else {
                    lo + step * k as f64
                };
                if curve.at(v)? >= eta {
                    next = Some((lo + step * (k - 1) as f64, v));
                    break;
                }
            }
            (lo, hi) = next.expect("upper end of the bracket is feasible");
        }
    } else {
        while hi - lo > V_TOLERANCE {
            let mid = 0.5 * (lo + hi);
            if curve.at(mid)? >= eta {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    solution(params, sic, hi, true, diagnostics)
}

/// `E(v_star) − E(v_baseline)` with `v_baseline = params.v()`.
///
/// Nonnegative whenever the baseline split itself meets `eta` (in particular
/// for `eta = Π_NC(v_baseline)`); negative if the target forces a larger `v`.
pub fn energy_gain(
    params: &NetworkParams,
    sic: &SicConfig,
    eta: f64,
) -> Result<f64, OptimizeError> {
    let sol = optimal_split(params, sic, eta)?;
    let baseline_feasible = analytic::coverage_sic(params, sic)?.pi_sic >= eta;
    let v = if baseline_feasible {
        sol.v_star.min(params.v())
    } else {
        sol.v_star
    };
    Ok(avg_harvested_energy(&params.with_v(v)?) - avg_harvested_energy(params))
}

/// The default coverage target: no-SIC coverage at the configured split.
pub fn default_target(params: &NetworkParams) -> f64 {
    coverage_no_sic(params)
}
