//! Command-line surface. Flags override the config file, which overrides
//! the defaults.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use latgas::trend::WeightKind;

use crate::commands;
use crate::config::{self, Config, InitKind, RegimeKind, ResamplingKind};
use crate::data::Schema;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "latgas", version, about = "Lattice-gas market model: simulation, predictions and empirical scaling analysis")]
#[command(after_help = config::COMMON_KEYS)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Glauber simulation of the lattice; writes magnetization.csv, returns.csv, params.json.
    #[command(after_help = config::SIMULATE_KEYS)]
    Simulate(SimulateArgs),
    /// Theory curves over T = 2^k; writes one CSV per curve and summary.json.
    #[command(after_help = config::PREDICT_KEYS)]
    Predict(PredictArgs),
    /// Empirical pipeline on daily prices; writes report.json, fig1d.csv, fig6.csv, fig8.csv, table2.csv.
    #[command(after_help = config::ANALYZE_KEYS)]
    Analyze(AnalyzeArgs),
    /// Fits kappa to trend variances and converts it to a network dimension.
    #[command(name = "fit-kappa", after_help = config::FIT_KAPPA_KEYS)]
    FitKappa(FitKappaArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML config file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Master seed [default: 0].
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Output directory [default: out].
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads, 0 = all cores [default: 0].
    #[arg(long)]
    pub threads: Option<usize>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<Config, CliError> {
        let mut c = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        set(&mut c.seed, self.seed);
        set(&mut c.out, self.out.clone());
        set(&mut c.threads, self.threads);
        Ok(c)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn set_some<T>(slot: &mut Option<T>, value: Option<T>) {
    if value.is_some() {
        *slot = value;
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub dims: Option<usize>,
    #[arg(long)]
    pub side: Option<usize>,
    #[arg(long)]
    pub temperature: Option<f64>,
    /// random | all_up | all_down
    #[arg(long)]
    pub init: Option<InitKind>,
    #[arg(long)]
    pub burn_in: Option<u64>,
    #[arg(long)]
    pub sweeps: Option<u64>,
    #[arg(long)]
    pub thin: Option<u64>,
}

impl SimulateArgs {
    pub fn resolve(&self) -> Result<Config, CliError> {
        let mut c = self.common.resolve()?;
        let s = &mut c.simulate;
        set(&mut s.dims, self.dims);
        set(&mut s.side, self.side);
        set_some(&mut s.temperature, self.temperature);
        set(&mut s.init, self.init);
        set_some(&mut s.burn_in, self.burn_in);
        set_some(&mut s.sweeps, self.sweeps);
        set(&mut s.thin, self.thin);
        Ok(c)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, conflicts_with = "kappa")]
    pub dimension: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// scaling | exponential | matched
    #[arg(long)]
    pub regime: Option<RegimeKind>,
    #[arg(long)]
    pub t_star: Option<f64>,
    /// Comma-separated k.
    #[arg(long, value_delimiter = ',')]
    pub scales: Option<Vec<u32>>,
}

impl PredictArgs {
    pub fn resolve(&self) -> Result<Config, CliError> {
        let mut c = self.common.resolve()?;
        let p = &mut c.predict;
        if self.dimension.is_some() {
            p.dimension = self.dimension;
            p.kappa = None;
        }
        if self.kappa.is_some() {
            p.kappa = self.kappa;
            p.dimension = None;
        }
        set(&mut p.tau, self.tau);
        set(&mut p.regime, self.regime);
        set_some(&mut p.t_star, self.t_star);
        set(&mut p.scales, self.scales.clone());
        Ok(c)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Price CSV files.
    #[arg(value_name = "PRICES")]
    pub inputs: Vec<PathBuf>,
    /// long | wide
    #[arg(long)]
    pub schema: Option<Schema>,
    /// Comma-separated k of the trend horizons T = 2^k.
    #[arg(long, value_delimiter = ',')]
    pub horizons: Option<Vec<u32>>,
    /// phi | psi | step
    #[arg(long)]
    pub estimator: Option<WeightKind>,
    #[arg(long)]
    pub bootstrap: Option<usize>,
    #[arg(long)]
    pub folds: Option<usize>,
    /// days | blocks
    #[arg(long)]
    pub resampling: Option<ResamplingKind>,
    #[arg(long)]
    pub block_length: Option<usize>,
    /// Comma-separated moment orders.
    #[arg(long, value_delimiter = ',')]
    pub qs: Option<Vec<f64>>,
    /// Comma-separated k of the variance fit.
    #[arg(long, value_delimiter = ',')]
    pub kappa_scales: Option<Vec<u32>>,
    #[arg(long)]
    pub max_moment_horizon: Option<usize>,
}

impl AnalyzeArgs {
    pub fn resolve(&self) -> Result<Config, CliError> {
        let mut c = self.common.resolve()?;
        let a = &mut c.analyze;
        if !self.inputs.is_empty() {
            a.inputs = self.inputs.clone();
        }
        set(&mut a.schema, self.schema);
        set(&mut a.horizons, self.horizons.clone());
        set(&mut a.estimator, self.estimator);
        set(&mut a.bootstrap, self.bootstrap);
        set(&mut a.folds, self.folds);
        set(&mut a.resampling, self.resampling);
        set(&mut a.block_length, self.block_length);
        set(&mut a.qs, self.qs.clone());
        set_some(&mut a.kappa_scales, self.kappa_scales.clone());
        set(&mut a.max_moment_horizon, self.max_moment_horizon);
        Ok(c)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct FitKappaArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Variance CSV.
    #[arg(value_name = "VARIANCES")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub column: Option<String>,
    /// Comma-separated k to keep.
    #[arg(long, value_delimiter = ',')]
    pub scales: Option<Vec<u32>>,
    /// Convert this kappa instead of fitting.
    #[arg(long)]
    pub kappa: Option<f64>,
}

impl FitKappaArgs {
    pub fn resolve(&self) -> Result<Config, CliError> {
        let mut c = self.common.resolve()?;
        let f = &mut c.fit_kappa;
        set_some(&mut f.input, self.input.clone());
        set(&mut f.column, self.column.clone());
        set_some(&mut f.scales, self.scales.clone());
        set_some(&mut f.kappa, self.kappa);
        Ok(c)
    }
}

fn init_threads(threads: usize) {
    if threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }
}

/// Resolves the configuration and runs the command; returns the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let config = match &cli.command {
        Command::Simulate(a) => a.resolve()?,
        Command::Predict(a) => a.resolve()?,
        Command::Analyze(a) => a.resolve()?,
        Command::FitKappa(a) => a.resolve()?,
    };
    init_threads(config.threads);
    match &cli.command {
        Command::Simulate(_) => commands::simulate::run(&config),
        Command::Predict(_) => commands::predict::run(&config),
        Command::Analyze(_) => commands::analyze::run(&config),
        Command::FitKappa(_) => commands::fit_kappa::run(&config).map(|(files, _)| files),
    }
}
