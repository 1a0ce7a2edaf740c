//! Model A dynamics: single-spin-flip Glauber heat bath on the lattice, the
//! resulting magnetization series, and the zero-mode Langevin integrator.
//!
//! One time unit is one sweep (`N` attempted flips at uniformly random sites).

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{Init, LatticeError, SpinLattice};
use crate::rng;
use crate::trend::{ReturnSeries, TrendError};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DynamicsError {
    #[error("invalid simulation parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("series too short: need at least {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("series has zero variance")]
    ZeroVariance,
    #[error("time step {dt} exceeds the stability bound {bound}")]
    Unstable { dt: f64, bound: f64 },
    #[error("zero-mode path diverged at step {step}")]
    Divergence { step: usize },
}

impl From<TrendError> for DynamicsError {
    fn from(e: TrendError) -> Self {
        match e {
            TrendError::ZeroVariance => DynamicsError::ZeroVariance,
            other => DynamicsError::InvalidParams(other.to_string()),
        }
    }
}

/// Critical temperature of the square-lattice model in these units.
///
/// With `s = ±1/2` and coupling `1/D` the standard Ising coupling is
/// `J = 1/(4D) = 1/8`, so Onsager's `2J/ln(1+√2)` gives ≈ 0.28365.
pub fn critical_temperature_2d() -> f64 {
    let j = 1.0 / 8.0;
    2.0 * j / (1.0 + 2f64.sqrt()).ln()
}

/// Heat-bath acceptance `1/(1 + e^{ΔE/T})`.
pub fn glauber_flip_probability(delta_e: f64, temperature: f64) -> f64 {
    let x = delta_e / temperature;
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Flip probabilities indexed by `(σ_i·Σσ_j + 2D) / 2`, i.e. every energy
/// change a single flip can produce.
struct FlipTable {
    dims: usize,
    probs: Vec<f64>,
}

impl FlipTable {
    fn new(dims: usize, temperature: f64) -> Self {
        let probs = (0..=2 * dims)
            .map(|k| {
                let signed = 2 * k as i64 - 2 * dims as i64;
                glauber_flip_probability(signed as f64 / (2.0 * dims as f64), temperature)
            })
            .collect();
        FlipTable { dims, probs }
    }

    #[inline]
    fn prob(&self, lattice: &SpinLattice, site: usize) -> f64 {
        let up = lattice.is_up(site);
        let aligned = lattice.neighbors(site).iter().filter(|&&j| lattice.is_up(j) == up).count();
        // σ_i·Σσ_j = aligned − (2D − aligned)
        self.probs[aligned]
    }
}

/// One sweep: `N` Glauber updates at uniformly random sites.
pub fn sweep<R: Rng + ?Sized>(lattice: &mut SpinLattice, temperature: f64, rng: &mut R) {
    let table = FlipTable::new(lattice.dims(), temperature);
    sweep_with(&table, lattice, rng);
}

fn sweep_with<R: Rng + ?Sized>(table: &FlipTable, lattice: &mut SpinLattice, rng: &mut R) {
    debug_assert_eq!(table.dims, lattice.dims());
    let n = lattice.n_sites();
    for _ in 0..n {
        let site = rng.random_range(0..n);
        let p = table.prob(lattice, site);
        if rng.random::<f64>() < p {
            lattice.flip(site);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationParams {
    pub dims: usize,
    pub side: usize,
    pub init: Init,
    pub temperature: f64,
    /// Total sweeps including burn-in.
    pub sweeps: u64,
    pub burn_in: u64,
    /// Record every `thin`-th sweep. Also the number of sweeps per recorded
    /// time step when the series is compared with daily data.
    pub thin: u64,
    pub seed: u64,
}

impl SimulationParams {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        let bad = |m: String| Err(DynamicsError::InvalidParams(m));
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return bad(format!("temperature must be positive, got {}", self.temperature));
        }
        if self.sweeps == 0 {
            return bad("sweeps must be positive".into());
        }
        if self.burn_in >= self.sweeps {
            return bad(format!("burn_in {} must be below sweeps {}", self.burn_in, self.sweeps));
        }
        if self.thin == 0 {
            return bad("thin must be positive".into());
        }
        Ok(())
    }

    pub fn recorded_len(&self) -> usize {
        ((self.sweeps - self.burn_in) / self.thin) as usize
    }
}

/// Heuristic burn-in of `10·L^z` sweeps.
pub fn default_burn_in(side: usize, z: f64) -> u64 {
    (10.0 * (side as f64).powf(z)).ceil() as u64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MagnetizationSeries {
    /// Sweep number (1-based) at which each value was recorded.
    pub sweeps: Vec<u64>,
    pub values: Vec<f64>,
    pub n_sites: usize,
    pub params: SimulationParams,
}

impl MagnetizationSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `P = 1 + 2M/N` for each recorded value.
    pub fn prices(&self) -> Vec<f64> {
        let n = self.n_sites as f64;
        self.values.iter().map(|m| 1.0 + 2.0 * m / n).collect()
    }

    /// `|M|/N` per record.
    pub fn abs_per_site(&self) -> Vec<f64> {
        let n = self.n_sites as f64;
        self.values.iter().map(|m| m.abs() / n).collect()
    }
}

pub fn run_simulation(params: &SimulationParams) -> Result<MagnetizationSeries, DynamicsError> {
    let lattice = SpinLattice::new(params.dims, params.side, params.init)?;
    run_from(lattice, params)
}

/// Runs the dynamics from an explicit starting configuration; `params.init`
/// is ignored.
pub fn run_from(mut lattice: SpinLattice, params: &SimulationParams) -> Result<MagnetizationSeries, DynamicsError> {
    params.validate()?;
    if lattice.dims() != params.dims || lattice.side() != params.side {
        return Err(DynamicsError::InvalidParams("lattice shape does not match params".into()));
    }
    let table = FlipTable::new(params.dims, params.temperature);
    let mut rng = rng::stream_rng(params.seed, rng::STREAM_MAIN);
    let cap = params.recorded_len();
    let mut sweeps = Vec::with_capacity(cap);
    let mut values = Vec::with_capacity(cap);
    for s in 1..=params.sweeps {
        sweep_with(&table, &mut lattice, &mut rng);
        if s > params.burn_in && (s - params.burn_in) % params.thin == 0 {
            sweeps.push(s);
            values.push(lattice.magnetization());
        }
    }
    Ok(MagnetizationSeries { sweeps, values, n_sites: lattice.n_sites(), params: params.clone() })
}

/// `count` independent replicas in parallel. Replica `i` runs with seed
/// `derive_seed(params.seed, i)`; a random initial configuration is reseeded
/// the same way.
pub fn run_replicas(params: &SimulationParams, count: usize) -> Result<Vec<MagnetizationSeries>, DynamicsError> {
    params.validate()?;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let seed = rng::derive_seed(params.seed, i as u64);
            let init = match params.init {
                Init::Random(_) => Init::Random(seed),
                other => other,
            };
            run_simulation(&SimulationParams { seed, init, ..params.clone() })
        })
        .collect()
}

/// Returns as first differences of `M`, scaled to unit variance.
pub fn magnetization_to_returns(series: &MagnetizationSeries) -> Result<ReturnSeries, DynamicsError> {
    if series.len() < 2 {
        return Err(DynamicsError::TooShort { needed: 2, got: series.len() });
    }
    let diffs: Vec<f64> = series.values.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(ReturnSeries::normalize(&diffs)?)
}

const MIN_BINDER_SAMPLES: usize = 100;

/// Binder cumulant `1 − ⟨M⁴⟩/(3⟨M²⟩²)`.
pub fn binder_cumulant(samples: &[f64]) -> Result<f64, DynamicsError> {
    if samples.len() < MIN_BINDER_SAMPLES {
        return Err(DynamicsError::TooShort { needed: MIN_BINDER_SAMPLES, got: samples.len() });
    }
    binder_from_sums(samples.iter().fold((0.0, 0.0), |(m2, m4), &m| (m2 + m * m, m4 + m.powi(4))), samples.len())
}

fn binder_from_sums((m2, m4): (f64, f64), n: usize) -> Result<f64, DynamicsError> {
    let m2 = m2 / n as f64;
    let m4 = m4 / n as f64;
    if m2 == 0.0 {
        return Err(DynamicsError::ZeroVariance);
    }
    Ok(1.0 - m4 / (3.0 * m2 * m2))
}

/// Binder cumulant with a delete-one-block jackknife standard error over
/// `blocks` contiguous blocks, which absorbs the autocorrelation of the series
/// when blocks are much longer than its correlation time.
pub fn binder_cumulant_with_error(samples: &[f64], blocks: usize) -> Result<(f64, f64), DynamicsError> {
    let value = binder_cumulant(samples)?;
    if blocks < 2 || samples.len() < blocks {
        return Err(DynamicsError::InvalidParams(format!("need at least 2 blocks of samples, got {blocks}")));
    }
    let block_len = samples.len() / blocks;
    let sums: Vec<(f64, f64)> = samples
        .chunks_exact(block_len)
        .take(blocks)
        .map(|c| c.iter().fold((0.0, 0.0), |(a, b), &m| (a + m * m, b + m.powi(4))))
        .collect();
    let total = sums.iter().fold((0.0, 0.0), |(a, b), s| (a + s.0, b + s.1));
    let used = block_len * blocks;
    let leave_out = sums
        .iter()
        .map(|s| binder_from_sums((total.0 - s.0, total.1 - s.1), used - block_len))
        .collect::<Result<Vec<_>, _>>()?;
    let mean = leave_out.iter().sum::<f64>() / blocks as f64;
    let var = leave_out.iter().map(|u| (u - mean).powi(2)).sum::<f64>() * (blocks - 1) as f64 / blocks as f64;
    Ok((value, var.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AutocorrelationTime {
    /// Integrated time `1/2 + Σ_{t=1}^{W} ρ(t)`, in units of the series step.
    pub tau: f64,
    /// Summation window `W`.
    pub window: usize,
    /// False when no self-consistent window was found or the series is
    /// shorter than `100·τ`.
    pub reliable: bool,
}

const WINDOW_FACTOR: f64 = 6.0;

/// Integrated autocorrelation time with the self-consistent window
/// `W ≥ 6·τ(W)`.
pub fn autocorrelation_time(values: &[f64]) -> Result<AutocorrelationTime, DynamicsError> {
    let n = values.len();
    if n < 4 {
        return Err(DynamicsError::TooShort { needed: 4, got: n });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let c0 = centered.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return Err(DynamicsError::ZeroVariance);
    }
    let mut tau = 0.5;
    let max_lag = n / 2;
    for w in 1..=max_lag {
        let cw = centered[..n - w].iter().zip(&centered[w..]).map(|(a, b)| a * b).sum::<f64>() / n as f64;
        tau += cw / c0;
        if w as f64 >= WINDOW_FACTOR * tau {
            let reliable = n as f64 >= 100.0 * tau;
            return Ok(AutocorrelationTime { tau, window: w, reliable });
        }
    }
    Ok(AutocorrelationTime { tau, window: max_lag, reliable: false })
}

/// Parameters of `π̇ = a − (r/2)π − (g/12)π³ + η`, unit noise variance per
/// unit time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroModeParams {
    pub r: f64,
    pub g: f64,
    /// Drift (risk premium).
    pub a: f64,
    pub dt: f64,
    pub steps: usize,
    pub pi0: f64,
    pub seed: u64,
}

impl ZeroModeParams {
    /// Largest allowed step, `0.1 / max(1, |r|, g)`.
    pub fn stability_bound(&self) -> f64 {
        0.1 / 1f64.max(self.r.abs()).max(self.g)
    }

    /// Potential `V(π) = (r/4)π² + (g/48)π⁴ − aπ` whose negative gradient is
    /// the drift.
    pub fn potential(&self, pi: f64) -> f64 {
        self.r / 4.0 * pi * pi + self.g / 48.0 * pi.powi(4) - self.a * pi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceDeviationSeries {
    /// `π(k·dt)` for `k = 0..=steps`.
    pub values: Vec<f64>,
    pub dt: f64,
}

const DIVERGENCE_GUARD: f64 = 1e100;

/// Euler–Maruyama path of the zero-mode Langevin equation.
pub fn integrate_zero_mode(params: &ZeroModeParams) -> Result<PriceDeviationSeries, DynamicsError> {
    if params.g < 0.0 {
        return Err(DynamicsError::InvalidParams("g must be non-negative".into()));
    }
    if params.steps == 0 {
        return Err(DynamicsError::InvalidParams("steps must be positive".into()));
    }
    let bound = params.stability_bound();
    if !(params.dt > 0.0 && params.dt <= bound) {
        return Err(DynamicsError::Unstable { dt: params.dt, bound });
    }
    let mut rng = rng::stream_rng(params.seed, rng::STREAM_MAIN);
    let sqrt_dt = params.dt.sqrt();
    let mut values = Vec::with_capacity(params.steps + 1);
    let mut pi = params.pi0;
    values.push(pi);
    for step in 1..=params.steps {
        let drift = params.a - 0.5 * params.r * pi - params.g / 12.0 * pi * pi * pi;
        let noise: f64 = rng.sample(StandardNormal);
        pi += drift * params.dt + sqrt_dt * noise;
        if !pi.is_finite() || pi.abs() > DIVERGENCE_GUARD {
            return Err(DynamicsError::Divergence { step });
        }
        values.push(pi);
    }
    Ok(PriceDeviationSeries { values, dt: params.dt })
}
