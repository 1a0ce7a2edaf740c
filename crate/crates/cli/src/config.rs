//! Pipeline configuration.
//!
//! Values are resolved as command-line flag, then config file, then the
//! default below. The file is TOML with top-level `seed`, `out` and `threads`
//! and one table per command.

use std::path::{Path, PathBuf};

use latgas::dynamics::{critical_temperature_2d, default_burn_in};
use latgas::stats::Resampling;
use latgas::theory::{exponents_for_dimension, kappa_for_dimension, Regime};
use latgas::trend::WeightKind;
use latgas::Init;
use serde::{Deserialize, Serialize};

use crate::data::Schema;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub out: PathBuf,
    /// Worker threads; 0 uses every core. Results do not depend on it.
    pub threads: usize,
    pub simulate: SimulateConfig,
    pub predict: PredictConfig,
    pub analyze: AnalyzeConfig,
    pub fit_kappa: FitKappaConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            out: PathBuf::from("out"),
            threads: 0,
            simulate: SimulateConfig::default(),
            predict: PredictConfig::default(),
            analyze: AnalyzeConfig::default(),
            fit_kappa: FitKappaConfig::default(),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
        toml::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    Random,
    AllUp,
    AllDown,
}

impl std::str::FromStr for InitKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(InitKind::Random),
            "all_up" | "all-up" => Ok(InitKind::AllUp),
            "all_down" | "all-down" => Ok(InitKind::AllDown),
            other => Err(format!("unknown init `{other}` (expected random, all_up or all_down)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub dims: usize,
    pub side: usize,
    /// Defaults to the critical temperature, known in closed form for 2D only.
    pub temperature: Option<f64>,
    pub init: InitKind,
    /// Defaults to `10·L^z`.
    pub burn_in: Option<u64>,
    /// Total sweeps including burn-in; defaults to burn-in plus 10000.
    pub sweeps: Option<u64>,
    pub thin: u64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig { dims: 2, side: 32, temperature: None, init: InitKind::Random, burn_in: None, sweeps: None, thin: 1 }
    }
}

pub const DEFAULT_RECORDED_SWEEPS: u64 = 10_000;

impl SimulateConfig {
    pub fn temperature(&self) -> Result<f64, CliError> {
        match (self.temperature, self.dims) {
            (Some(t), _) => Ok(t),
            (None, 2) => Ok(critical_temperature_2d()),
            (None, d) => Err(CliError::Validation(format!(
                "no default temperature for dims = {d}; set simulate.temperature"
            ))),
        }
    }

    pub fn burn_in(&self) -> Result<u64, CliError> {
        if let Some(b) = self.burn_in {
            return Ok(b);
        }
        let z = exponents_for_dimension(self.dims as f64)
            .map_err(|_| {
                CliError::Validation(format!("no dynamic exponent for dims = {}; set simulate.burn_in", self.dims))
            })?
            .z;
        Ok(default_burn_in(self.side, z))
    }

    pub fn sweeps(&self) -> Result<u64, CliError> {
        match self.sweeps {
            Some(s) => Ok(s),
            None => Ok(self.burn_in()? + DEFAULT_RECORDED_SWEEPS),
        }
    }

    pub fn init(&self, seed: u64) -> Init {
        match self.init {
            InitKind::Random => Init::Random(latgas::rng::derive_seed(seed, latgas::rng::STREAM_INIT)),
            InitKind::AllUp => Init::AllUp,
            InitKind::AllDown => Init::AllDown,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeKind {
    Scaling,
    Exponential,
    Matched,
}

impl std::str::FromStr for RegimeKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "scaling" => Ok(RegimeKind::Scaling),
            "exponential" => Ok(RegimeKind::Exponential),
            "matched" => Ok(RegimeKind::Matched),
            other => Err(format!("unknown regime `{other}` (expected scaling, exponential or matched)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictConfig {
    /// Network dimension; κ follows from the exponent table. Used when
    /// `kappa` is not given, defaulting to 3.
    pub dimension: Option<f64>,
    pub kappa: Option<f64>,
    pub tau: f64,
    pub regime: RegimeKind,
    /// Crossover of the matched regime; defaults to `τ/4`.
    pub t_star: Option<f64>,
    pub scales: Vec<u32>,
}

pub const DEFAULT_DIMENSION: f64 = 3.0;

impl Default for PredictConfig {
    fn default() -> Self {
        PredictConfig {
            dimension: None,
            kappa: None,
            tau: 65536.0,
            regime: RegimeKind::Scaling,
            t_star: None,
            scales: (1..=13).collect(),
        }
    }
}

impl PredictConfig {
    /// `(κ, D)` with `D` set when κ came from a dimension.
    pub fn kappa(&self) -> Result<(f64, Option<f64>), CliError> {
        match (self.kappa, self.dimension) {
            (Some(_), Some(_)) => Err(CliError::Validation("set either predict.kappa or predict.dimension, not both".into())),
            (Some(k), None) => Ok((k, None)),
            (None, d) => {
                let d = d.unwrap_or(DEFAULT_DIMENSION);
                Ok((kappa_for_dimension(d)?, Some(d)))
            }
        }
    }

    pub fn regime(&self) -> Regime {
        match self.regime {
            RegimeKind::Scaling => Regime::Scaling,
            RegimeKind::Exponential => Regime::Exponential,
            RegimeKind::Matched => Regime::Matched { t_star: self.t_star.unwrap_or(self.tau / 4.0) },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResamplingKind {
    Days,
    Blocks,
}

impl std::str::FromStr for ResamplingKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "days" => Ok(ResamplingKind::Days),
            "blocks" => Ok(ResamplingKind::Blocks),
            other => Err(format!("unknown resampling `{other}` (expected days or blocks)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub inputs: Vec<PathBuf>,
    pub schema: Schema,
    /// Trend horizons `T = 2^k`.
    pub horizons: Vec<u32>,
    pub estimator: WeightKind,
    pub bootstrap: usize,
    pub folds: usize,
    pub resampling: ResamplingKind,
    pub block_length: usize,
    /// Moment orders for the generalized Hurst exponents.
    pub qs: Vec<f64>,
    /// Scales `k` of the variance fit for κ; defaults to `horizons`.
    pub kappa_scales: Option<Vec<u32>>,
    /// Longest horizon of the moment scaling, in days.
    pub max_moment_horizon: usize,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig {
            inputs: Vec::new(),
            schema: Schema::Long,
            horizons: (1..=10).collect(),
            estimator: WeightKind::Phi,
            bootstrap: 5000,
            folds: 15,
            resampling: ResamplingKind::Days,
            block_length: 20,
            qs: vec![1.0, 2.0, 3.0, 4.0],
            kappa_scales: None,
            max_moment_horizon: 1024,
        }
    }
}

impl AnalyzeConfig {
    pub fn resampling(&self) -> Resampling {
        match self.resampling {
            ResamplingKind::Days => Resampling::Days,
            ResamplingKind::Blocks => Resampling::Blocks { length: self.block_length },
        }
    }

    pub fn kappa_scales(&self) -> Vec<u32> {
        self.kappa_scales.clone().unwrap_or_else(|| self.horizons.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitKappaConfig {
    /// CSV with a `k` (or `T`) column and a variance column.
    pub input: Option<PathBuf>,
    pub column: String,
    /// Restrict the fit to these `k`; all rows when unset.
    pub scales: Option<Vec<u32>>,
    /// Convert a known κ instead of fitting one.
    pub kappa: Option<f64>,
}

impl Default for FitKappaConfig {
    fn default() -> Self {
        FitKappaConfig { input: None, column: "variance".into(), scales: None, kappa: None }
    }
}

pub const COMMON_KEYS: &str = "\
Top-level config keys (TOML):
  seed = 0                 master seed
  out = \"out\"              output directory
  threads = 0              worker threads, 0 = all cores";

pub const SIMULATE_KEYS: &str = "\
[simulate] config keys (flag > file > default):
  dims = 2                 lattice dimension
  side = 32                lattice side L
  temperature = T_c        default 0.28364816427662776 (2D critical point), required otherwise
  init = \"random\"          random | all_up | all_down
  burn_in = 10*L^z         discarded sweeps, z from the exponent table
  sweeps = burn_in+10000   total sweeps including burn-in
  thin = 1                 record every thin-th sweep";

pub const PREDICT_KEYS: &str = "\
[predict] config keys (flag > file > default):
  dimension = 3            network dimension, kappa from the exponent table
  kappa                    exponent (2-eta)/z; excludes dimension
  tau = 65536              correlation time
  regime = \"scaling\"       scaling | exponential | matched
  t_star = tau/4           crossover of the matched regime (heuristic)
  scales = [1, ..., 13]    horizons T = 2^k";

pub const ANALYZE_KEYS: &str = "\
[analyze] config keys (flag > file > default):
  inputs = []              price CSV files (positional arguments replace them)
  schema = \"long\"          long (market,date,price) | wide (date,<market>...)
  horizons = [1, ..., 10]  trend horizons T = 2^k business days
  estimator = \"phi\"        phi | psi | step
  bootstrap = 5000         bootstrap resamples of days
  folds = 15               cross-validation folds
  resampling = \"days\"      days | blocks
  block_length = 20        block length for resampling = blocks
  qs = [1, 2, 3, 4]        moment orders of the Hurst exponents
  kappa_scales = horizons  scales k of the variance fit for kappa
  max_moment_horizon = 1024  longest moment-scaling horizon in days";

pub const FIT_KAPPA_KEYS: &str = "\
[fit_kappa] config keys (flag > file > default):
  input                    CSV with a k (or T) column and a variance column
  column = \"variance\"      name of the variance column
  scales = all rows        restrict the fit to these k
  kappa                    convert this kappa instead of fitting";
