//! Parameter sweeps behind the command-line tool and their CSV output.

mod csv;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::analytic::{
    avg_harvested_energy, coverage_sic, harvested_energy_upper_bound, AnalyticError, EnergyBound,
};
use crate::model::{ModelError, NetworkParams, SicConfig};
use crate::optimizer::{default_target, optimal_split, OptimizeError};
use crate::simulator::{estimate_coverage_profile, SimConfig, SimError, SimEstimate};

pub use csv::{emit_csv, Cell, SweepTable};

/// Errors surfaced by the command-line layer, grouped by exit status.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn annotate(self, context: &str) -> Self {
        match self {
            CliError::Config(m) => CliError::Config(format!("{context}: {m}")),
            CliError::Numerical(m) => CliError::Numerical(format!("{context}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{context}: {m}")),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<AnalyticError> for CliError {
    fn from(e: AnalyticError) -> Self {
        match e {
            AnalyticError::InvalidArgument { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<OptimizeError> for CliError {
    fn from(e: OptimizeError) -> Self {
        match e {
            OptimizeError::InvalidTarget(_) => CliError::Config(e.to_string()),
            OptimizeError::Model(m) => m.into(),
            OptimizeError::Analytic(a) => a.into(),
            OptimizeError::Infeasible { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Config(e.to_string())
    }
}

/// A quantity that a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Param {
    /// Maximum number of cancellations.
    N,
    ThetaDb,
    PtDb,
    Lambda,
    D0,
    Alpha,
    V,
    Zeta,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::N => "n",
            Param::ThetaDb => "theta_db",
            Param::PtDb => "p_t_db",
            Param::Lambda => "lambda",
            Param::D0 => "d0",
            Param::Alpha => "alpha",
            Param::V => "v",
            Param::Zeta => "zeta",
        }
    }

    const ALL: [Param; 8] = [
        Param::N,
        Param::ThetaDb,
        Param::PtDb,
        Param::Lambda,
        Param::D0,
        Param::Alpha,
        Param::V,
        Param::Zeta,
    ];

    fn cell(self, value: f64) -> Cell {
        match self {
            Param::N => Cell::Int(value as i64),
            _ => Cell::Real(value),
        }
    }

    fn apply(
        self,
        value: f64,
        params: NetworkParams,
        sic: SicConfig,
    ) -> Result<(NetworkParams, SicConfig), CliError> {
        let b = params.to_builder();
        let b = match self {
            Param::N => {
                return Ok((
                    params,
                    SicConfig {
                        n_max: value as usize,
                        ..sic
                    },
                ))
            }
            Param::ThetaDb => b.theta_db(value),
            Param::PtDb => b.p_t_db(value),
            Param::Lambda => b.lambda(value),
            Param::D0 => b.d0(value),
            Param::Alpha => b.alpha(value),
            Param::V => b.v(value),
            Param::Zeta => b.zeta(value),
        };
        Ok((b.build()?, sic))
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.replace('-', "_");
        Param::ALL
            .into_iter()
            .find(|p| p.name() == key)
            .ok_or_else(|| {
                let names: Vec<_> = Param::ALL.iter().map(|p| p.name()).collect();
                CliError::Config(format!(
                    "unknown parameter {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Quantities a sweep row can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Output {
    /// Analytic SIC coverage `pi_sic`.
    Analytic,
    /// Monte Carlo coverage with standard error and 95% interval.
    Simulated,
    /// Average harvested energy at the configured split.
    Energy,
    /// Optimal split `v_star` and the energy it yields.
    OptimizedV,
    /// Energy with the whole signal harvested (v → 0).
    UpperBound,
    /// As [`Output::UpperBound`] with the link distance also taken to zero.
    UpperBoundZeroDistance,
}

impl Output {
    const ALL: [Output; 6] = [
        Output::Analytic,
        Output::Simulated,
        Output::Energy,
        Output::OptimizedV,
        Output::UpperBound,
        Output::UpperBoundZeroDistance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Output::Analytic => "analytic",
            Output::Simulated => "simulated",
            Output::Energy => "energy",
            Output::OptimizedV => "optimized_v",
            Output::UpperBound => "upper_bound",
            Output::UpperBoundZeroDistance => "upper_bound_d0_zero",
        }
    }

    fn columns(self) -> &'static [&'static str] {
        match self {
            Output::Analytic => &["pi_sic"],
            Output::Simulated => &[
                "sim_pi_sic",
                "sim_std_error",
                "sim_ci95_low",
                "sim_ci95_high",
            ],
            Output::Energy => &["energy"],
            Output::OptimizedV => &["eta", "v_star", "energy_opt"],
            Output::UpperBound => &["upper_bound"],
            Output::UpperBoundZeroDistance => &["upper_bound_d0_zero"],
        }
    }
}

impl FromStr for Output {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.replace('-', "_");
        Output::ALL
            .into_iter()
            .find(|o| o.name() == key)
            .ok_or_else(|| {
                let names: Vec<_> = Output::ALL.iter().map(|o| o.name()).collect();
                CliError::Config(format!(
                    "unknown output {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Custom,
}

/// A parameter together with the values it takes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub param: Param,
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn new(param: Param, values: Vec<f64>) -> Self {
        Sweep { param, values }
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.values.is_empty() {
            return Err(CliError::Config(format!(
                "no values given for {}",
                self.param
            )));
        }
        for &x in &self.values {
            let ok = match self.param {
                Param::N => x >= 0.0 && x.fract() == 0.0 && x <= 1e6,
                _ => x.is_finite(),
            };
            if !ok {
                return Err(CliError::Config(format!(
                    "invalid value {x} for {}",
                    self.param
                )));
            }
        }
        Ok(())
    }
}

/// What to sweep and which columns to report. Rows run over the series
/// values (outer) and the axis values (inner).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub figure: Figure,
    pub axis: Sweep,
    pub series: Option<Sweep>,
    pub outputs: Vec<Output>,
    /// Cancellation depth used when the axis and series do not set `n`.
    pub n_max: usize,
    /// Coverage target for the optimizer; defaults per row to the no-SIC
    /// coverage at the row's split.
    pub eta: Option<f64>,
}

impl SweepSpec {
    /// Coverage against cancellation depth for three decoding thresholds.
    pub fn fig1() -> Self {
        SweepSpec {
            figure: Figure::Fig1,
            axis: Sweep::new(Param::N, (0..=4).map(f64::from).collect()),
            series: Some(Sweep::new(Param::ThetaDb, vec![-5.0, 0.0, 5.0])),
            outputs: vec![Output::Analytic, Output::Simulated, Output::OptimizedV],
            n_max: 1,
            eta: None,
        }
    }

    /// Harvested energy against transmit power.
    pub fn fig2() -> Self {
        SweepSpec {
            figure: Figure::Fig2,
            axis: Sweep::new(Param::PtDb, (2..=16).map(|k| 5.0 * f64::from(k)).collect()),
            series: Some(Sweep::new(Param::V, vec![0.5, 0.9])),
            outputs: vec![Output::Energy, Output::OptimizedV, Output::UpperBound],
            n_max: 1,
            eta: None,
        }
    }

    /// Harvested energy against network density for two link distances.
    pub fn fig3() -> Self {
        SweepSpec {
            figure: Figure::Fig3,
            axis: Sweep::new(
                Param::Lambda,
                (0..=8)
                    .map(|k| 10f64.powf(-5.0 + 0.5 * f64::from(k)))
                    .collect(),
            ),
            series: Some(Sweep::new(Param::D0, vec![1.0, 10.0])),
            outputs: vec![
                Output::Energy,
                Output::OptimizedV,
                Output::UpperBoundZeroDistance,
            ],
            n_max: 1,
            eta: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.axis.validate()?;
        if let Some(series) = &self.series {
            series.validate()?;
            if series.param == self.axis.param {
                return Err(CliError::Config(format!(
                    "axis and series both vary {}",
                    series.param
                )));
            }
        }
        if let Some(eta) = self.eta {
            if !(0.0..1.0).contains(&eta) {
                return Err(CliError::Config(format!("eta = {eta} must lie in [0, 1)")));
            }
        }
        Ok(())
    }

    pub fn headers(&self) -> Vec<String> {
        let mut h = Vec::new();
        if let Some(series) = &self.series {
            h.push(series.param.name().to_string());
        }
        h.push(self.axis.param.name().to_string());
        for o in &self.outputs {
            h.extend(o.columns().iter().map(|c| c.to_string()));
        }
        h
    }
}

fn estimate_cells(e: &SimEstimate) -> [Cell; 4] {
    [
        Cell::Real(e.mean),
        Cell::Real(e.std_error),
        Cell::Real(e.ci95_low),
        Cell::Real(e.ci95_high),
    ]
}

fn row_cells(
    spec: &SweepSpec,
    params: &NetworkParams,
    sic: &SicConfig,
    sim_cfg: &SimConfig,
    simulated: Option<&SimEstimate>,
) -> Result<Vec<Cell>, CliError> {
    let mut cells = Vec::new();
    for o in &spec.outputs {
        match o {
            Output::Analytic => cells.push(coverage_sic(params, sic)?.pi_sic.into()),
            Output::Simulated => {
                let est = match simulated {
                    Some(e) => *e,
                    None => *estimate_coverage_profile(params, sic, sim_cfg)?
                        .estimates
                        .last()
                        .expect("depth 0 always present"),
                };
                cells.extend(estimate_cells(&est));
            }
            Output::Energy => cells.push(avg_harvested_energy(params).into()),
            Output::OptimizedV => {
                let eta = spec.eta.unwrap_or_else(|| default_target(params));
                let sol = optimal_split(params, sic, eta)?;
                cells.extend([
                    Cell::Real(eta),
                    Cell::Real(sol.v_star),
                    Cell::Real(sol.energy),
                ]);
            }
            Output::UpperBound => {
                cells.push(harvested_energy_upper_bound(params, EnergyBound::FullSplit).into())
            }
            Output::UpperBoundZeroDistance => cells.push(
                harvested_energy_upper_bound(params, EnergyBound::FullSplitZeroDistance).into(),
            ),
        }
    }
    Ok(cells)
}

/// Evaluates every requested output for every (series, axis) combination.
///
/// When the axis is the cancellation depth, simulated columns for a series
/// come from one set of trials run at the largest depth, so they are
/// nondecreasing along the axis. Failures abort the sweep with the offending
/// row named in the message.
pub fn run_sweep(
    spec: &SweepSpec,
    params: &NetworkParams,
    sim_cfg: &SimConfig,
) -> Result<SweepTable, CliError> {
    spec.validate()?;
    let mut table = SweepTable::new(spec.headers());
    let base_sic = SicConfig::new(spec.n_max);
    let series: Vec<Option<f64>> = match &spec.series {
        Some(s) => s.values.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let wants_sim = spec.outputs.contains(&Output::Simulated);

    for sv in series {
        let series_label = match (&spec.series, sv) {
            (Some(s), Some(x)) => format!("{} = {x}", s.param),
            _ => String::new(),
        };
        let (sp, ssic) = match (&spec.series, sv) {
            (Some(s), Some(x)) => s
                .param
                .apply(x, *params, base_sic)
                .map_err(|e| e.annotate(&format!("row {series_label}")))?,
            _ => (*params, base_sic),
        };

        let profile = if wants_sim && spec.axis.param == Param::N {
            let deepest = spec.axis.values.iter().fold(0.0f64, |a, &b| a.max(b)) as usize;
            let sic = SicConfig {
                n_max: deepest,
                ..ssic
            };
            sim_cfg.validate(&sp)?;
            Some(
                estimate_coverage_profile(&sp, &sic, sim_cfg)
                    .map_err(|e| CliError::from(e).annotate(&format!("row {series_label}")))?,
            )
        } else {
            None
        };

        for &x in &spec.axis.values {
            let label = if series_label.is_empty() {
                format!("row {} = {x}", spec.axis.param)
            } else {
                format!("row {series_label}, {} = {x}", spec.axis.param)
            };
            let run = || -> Result<Vec<Cell>, CliError> {
                let (p, sic) = spec.axis.param.apply(x, sp, ssic)?;
                let sim = profile.as_ref().map(|pr| pr.estimates[sic.n_max]);
                let mut row = Vec::new();
                if let (Some(s), Some(v)) = (&spec.series, sv) {
                    row.push(s.param.cell(v));
                }
                row.push(spec.axis.param.cell(x));
                row.extend(row_cells(spec, &p, &sic, sim_cfg, sim.as_ref())?);
                Ok(row)
            };
            table.push_row(run().map_err(|e| e.annotate(&label))?);
        }
    }
    Ok(table)
}
