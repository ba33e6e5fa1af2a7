use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use swipt_sic::analytic::{
    avg_harvested_energy, coverage_sic, harvested_energy_upper_bound, mean_interference,
    EnergyBound,
};
use swipt_sic::cli::{
    emit_csv, run_sweep, Cell, CliError, Figure, Output, Param, Sweep, SweepSpec, SweepTable,
};
use swipt_sic::model::{NetworkParams, Ordering, ParamsConfig, SicConfig};
use swipt_sic::optimizer::{default_target, optimal_split, SplitDiagnostic};
use swipt_sic::simulator::{estimate_coverage_profile, estimate_energy, SimConfig, WindowRadius};

#[derive(Parser)]
#[command(
    name = "swipt-sic",
    version,
    about = "Coverage, harvested energy and power-split optimisation for SWIPT receivers with SIC"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic coverage with and without cancellation.
    Coverage(Common),
    /// Average harvested energy and its bounds.
    Energy(Common),
    /// Smallest split ratio meeting a coverage target.
    Optimize {
        #[command(flatten)]
        common: Common,
        /// Coverage target; defaults to the no-SIC coverage at --v.
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Monte Carlo coverage and energy next to the analytic values.
    Simulate(Common),
    /// Reproduce one of the preset figure sweeps.
    Figure {
        #[arg(value_enum)]
        which: FigureArg,
        #[command(flatten)]
        common: Common,
    },
    /// Custom sweep over one parameter, optionally repeated for a series.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Parameter on the axis (n, theta_db, p_t_db, lambda, d0, alpha, v, zeta).
        #[arg(long)]
        axis: Param,
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        values: Vec<f64>,
        #[arg(long, requires = "series_values")]
        series: Option<Param>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        series_values: Vec<f64>,
        /// Columns to report (analytic, simulated, energy, optimized_v,
        /// upper_bound, upper_bound_d0_zero).
        #[arg(long, value_delimiter = ',', default_value = "analytic")]
        outputs: Vec<Output>,
        #[arg(long)]
        eta: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureArg {
    Fig1,
    Fig2,
    Fig3,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderingArg {
    Distance,
    Power,
}

#[derive(Args)]
struct Common {
    /// JSON parameter file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pt_db: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    theta_db: Option<f64>,
    #[arg(long)]
    d0: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    v: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    /// Maximum number of interferers to cancel.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Simulation window radius; chosen automatically when omitted.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, value_enum, default_value = "distance")]
    ordering: OrderingArg,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn params(&self) -> Result<NetworkParams, CliError> {
        let mut b = NetworkParams::builder();
        if let Some(path) = &self.config {
            b = ParamsConfig::from_json_file(path)?.apply(b)?;
        }
        if let Some(x) = self.lambda {
            b = b.lambda(x);
        }
        if let Some(x) = self.pt_db {
            b = b.p_t_db(x);
        }
        if let Some(x) = self.theta_db {
            b = b.theta_db(x);
        }
        if let Some(x) = self.d0 {
            b = b.d0(x);
        }
        if let Some(x) = self.alpha {
            b = b.alpha(x);
        }
        if let Some(x) = self.v {
            b = b.v(x);
        }
        if let Some(x) = self.zeta {
            b = b.zeta(x);
        }
        Ok(b.build()?)
    }

    fn sic(&self, default_n: usize) -> SicConfig {
        let ordering = match self.ordering {
            OrderingArg::Distance => Ordering::ByDistance,
            OrderingArg::Power => Ordering::ByInstantaneousPower,
        };
        SicConfig::new(self.n.unwrap_or(default_n)).with_ordering(ordering)
    }

    fn sim(&self, params: &NetworkParams) -> Result<SimConfig, CliError> {
        let mut cfg = SimConfig::default();
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        if let Some(b) = self.batch_size {
            cfg.batch_size = b;
        }
        if let Some(r) = self.radius {
            cfg.window_radius = WindowRadius::Explicit(r);
        }
        cfg.validate(params)?;
        Ok(cfg)
    }

    fn emit(&self, table: &SweepTable) -> Result<(), CliError> {
        match &self.out {
            Some(path) => emit_csv(table, path),
            None => table
                .write_csv(io::stdout().lock())
                .map_err(|e| CliError::Io(format!("<stdout>: {e}"))),
        }
    }
}

fn real(x: f64) -> Cell {
    Cell::Real(x)
}

fn coverage(c: &Common) -> Result<SweepTable, CliError> {
    let p = c.params()?;
    let sic = c.sic(1);
    let b = coverage_sic(&p, &sic)?;
    let mut headers = vec!["n".to_string(), "pi_nc".into(), "pi_sic".into()];
    headers.extend((1..=sic.n_max).map(|j| format!("pi_d_{j}")));
    headers.extend((1..=sic.n_max).map(|j| format!("pi_c_{j}")));
    let mut row = vec![Cell::Int(sic.n_max as i64), real(b.pi_nc), real(b.pi_sic)];
    row.extend(b.pi_d.iter().copied().map(real));
    row.extend(b.pi_c[1..].iter().copied().map(real));
    let mut t = SweepTable::new(headers);
    t.push_row(row);
    Ok(t)
}

fn energy(c: &Common) -> Result<SweepTable, CliError> {
    let p = c.params()?;
    let mut t = SweepTable::new([
        "v",
        "energy",
        "upper_bound",
        "upper_bound_d0_zero",
        "mean_interference",
    ]);
    t.push_row(vec![
        real(p.v()),
        real(avg_harvested_energy(&p)),
        real(harvested_energy_upper_bound(&p, EnergyBound::FullSplit)),
        real(harvested_energy_upper_bound(
            &p,
            EnergyBound::FullSplitZeroDistance,
        )),
        real(mean_interference(&p)),
    ]);
    Ok(t)
}

fn optimize(c: &Common, eta: Option<f64>) -> Result<SweepTable, CliError> {
    let p = c.params()?;
    let sic = c.sic(1);
    let eta = eta.unwrap_or_else(|| default_target(&p));
    let sol = optimal_split(&p, &sic, eta)?;
    let baseline = avg_harvested_energy(&p);
    let non_monotone = sol
        .diagnostics
        .iter()
        .any(|d| matches!(d, SplitDiagnostic::NonMonotoneDetected { .. }));
    let mut t = SweepTable::new([
        "n",
        "eta",
        "v_star",
        "energy",
        "energy_baseline",
        "gain",
        "coverage_at_v_star",
        "constraint_active",
        "non_monotone",
    ]);
    t.push_row(vec![
        Cell::Int(sic.n_max as i64),
        real(eta),
        real(sol.v_star),
        real(sol.energy),
        real(baseline),
        real(sol.energy - baseline),
        real(sol.coverage_at_v_star),
        Cell::Int(sol.constraint_active as i64),
        Cell::Int(non_monotone as i64),
    ]);
    Ok(t)
}

fn simulate(c: &Common) -> Result<SweepTable, CliError> {
    let p = c.params()?;
    let sic = c.sic(1);
    let cfg = c.sim(&p)?;
    let profile = estimate_coverage_profile(&p, &sic, &cfg)?;
    let analytic = coverage_sic(&p, &sic)?;
    let e = estimate_energy(&p, &cfg)?;
    let mut t = SweepTable::new([
        "n",
        "sim_pi_sic",
        "sim_std_error",
        "sim_ci95_low",
        "sim_ci95_high",
        "pi_sic",
        "sim_energy",
        "sim_energy_std_error",
        "energy",
        "radius",
        "trials",
        "seed",
    ]);
    for (n, est) in profile.estimates.iter().enumerate() {
        let analytic_n = if n == sic.n_max {
            analytic.pi_sic
        } else {
            coverage_sic(&p, &SicConfig { n_max: n, ..sic })?.pi_sic
        };
        t.push_row(vec![
            Cell::Int(n as i64),
            real(est.mean),
            real(est.std_error),
            real(est.ci95_low),
            real(est.ci95_high),
            real(analytic_n),
            real(e.mean),
            real(e.std_error),
            real(avg_harvested_energy(&p)),
            real(cfg.radius(&p)),
            Cell::Int(cfg.trials as i64),
            Cell::Int(cfg.master_seed as i64),
        ]);
    }
    Ok(t)
}

fn sweep(c: &Common, mut spec: SweepSpec) -> Result<SweepTable, CliError> {
    let p = c.params()?;
    if let Some(n) = c.n {
        spec.n_max = n;
    }
    let cfg = c.sim(&p)?;
    run_sweep(&spec, &p, &cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Coverage(c) => c.emit(&coverage(&c)?),
        Command::Energy(c) => c.emit(&energy(&c)?),
        Command::Optimize { common, eta } => common.emit(&optimize(&common, eta)?),
        Command::Simulate(c) => c.emit(&simulate(&c)?),
        Command::Figure { which, common } => {
            let spec = match which {
                FigureArg::Fig1 => SweepSpec::fig1(),
                FigureArg::Fig2 => SweepSpec::fig2(),
                FigureArg::Fig3 => SweepSpec::fig3(),
            };
            common.emit(&sweep(&common, spec)?)
        }
        Command::Sweep {
            common,
            axis,
            values,
            series,
            series_values,
            outputs,
            eta,
        } => {
            let spec = SweepSpec {
                figure: Figure::Custom,
                axis: Sweep::new(axis, values),
                series: series.map(|s| Sweep::new(s, series_values)),
                outputs,
                n_max: 1,
                eta,
            };
            common.emit(&sweep(&common, spec)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("swipt-sic: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
