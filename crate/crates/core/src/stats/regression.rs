//! Next-day return regression `R(t+1) = a + b·φ(t) + c·φ(t)³ + ε`.
//!
//! Observations are pooled across markets. Each keeps the global day it
//! belongs to so that resampling and fold assignment act on whole days, which
//! preserves cross-market correlation.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linalg;
use super::StatsError;
use crate::rng;
use crate::trend::{ReturnSeries, TrendSeries};

pub const MIN_OBSERVATIONS: usize = 100;
pub const MIN_BOOTSTRAP_SAMPLES: usize = 100;
/// Minimum number of observations per cross-validation fold.
pub const MIN_FOLD_SIZE: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    /// Global day index of the trend (the return is the following day's).
    pub day: usize,
    pub market: usize,
    pub trend: f64,
    pub next_return: f64,
    /// `Σ_{n≤t} w(n)`: how much the trend moves per unit change of the
    /// subtracted premium. Zero when the trend is not tied to a premium.
    pub cum_weight: f64,
}

/// Pooled regression sample with the premium each market's trends were built
/// with.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegressionData {
    pub observations: Vec<Observation>,
    pub premiums: Vec<f64>,
}

impl RegressionData {
    /// Pairs `(φ(t), R(t+1))` from plain arrays, one market, day = index.
    pub fn from_arrays(trend: &[f64], next_return: &[f64]) -> Result<Self, StatsError> {
        if trend.len() != next_return.len() {
            return Err(StatsError::Misaligned(trend.len(), next_return.len()));
        }
        let observations = trend
            .iter()
            .zip(next_return)
            .enumerate()
            .map(|(day, (&trend, &next_return))| Observation { day, market: 0, trend, next_return, cum_weight: 0.0 })
            .collect();
        Ok(RegressionData { observations, premiums: vec![0.0] })
    }

    /// Single market with day = return index.
    pub fn from_series(trend: &TrendSeries, returns: &ReturnSeries) -> Result<Self, StatsError> {
        let mut data = RegressionData::default();
        data.push_market(trend, returns, None)?;
        Ok(data)
    }

    /// Appends one market. `days[t]` maps the market's return index to the
    /// global day index (identity when `None`). Warm-up trends and the last
    /// day, which has no next return, are skipped.
    pub fn push_market(
        &mut self,
        trend: &TrendSeries,
        returns: &ReturnSeries,
        days: Option<&[usize]>,
    ) -> Result<usize, StatsError> {
        if trend.len() != returns.len() {
            return Err(StatsError::Misaligned(trend.len(), returns.len()));
        }
        if let Some(d) = days {
            if d.len() != returns.len() {
                return Err(StatsError::Misaligned(d.len(), returns.len()));
            }
        }
        let market = self.premiums.len();
        self.premiums.push(trend.premium);
        let before = self.observations.len();
        for t in trend.warmup()..returns.len().saturating_sub(1) {
            self.observations.push(Observation {
                day: days.map_or(t, |d| d[t]),
                market,
                trend: trend.values[t],
                next_return: returns.values[t + 1],
                cum_weight: trend.weights.cumulative_weight(t),
            });
        }
        Ok(self.observations.len() - before)
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn n_markets(&self) -> usize {
        self.premiums.len()
    }

    /// Observation indices grouped by day, in increasing day order.
    fn days(&self) -> Vec<Vec<usize>> {
        let mut map: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, o) in self.observations.iter().enumerate() {
            map.entry(o.day).or_default().push(i);
        }
        map.into_values().collect()
    }
}

/// Sufficient statistics of the cubic regression: `Σφ^k` (k = 0..6),
/// `ΣRφ^k` (k = 0, 1, 3) and `ΣR²`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments {
    s: [f64; 7],
    t: [f64; 3],
    rr: f64,
}

impl Moments {
    fn add(&mut self, x: f64, y: f64) {
        let mut p = 1.0;
        for k in 0..7 {
            self.s[k] += p;
            p *= x;
        }
        let x3 = x * x * x;
        self.t[0] += y;
        self.t[1] += y * x;
        self.t[2] += y * x3;
        self.rr += y * y;
    }

    fn merge(&mut self, o: &Moments) {
        for k in 0..7 {
            self.s[k] += o.s[k];
        }
        for k in 0..3 {
            self.t[k] += o.t[k];
        }
        self.rr += o.rr;
    }

    fn normal_matrix(&self) -> [[f64; 3]; 3] {
        let s = &self.s;
        [[s[0], s[1], s[3]], [s[1], s[2], s[4]], [s[3], s[4], s[6]]]
    }

    fn solve(&self) -> Result<[f64; 3], StatsError> {
        linalg::solve(&self.normal_matrix(), &self.t)
    }
}

fn predict(beta: &[f64; 3], x: f64) -> f64 {
    beta[0] + beta[1] * x + beta[2] * x * x * x
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub value: f64,
    pub std_error: f64,
    pub t_stat: f64,
}

impl Coefficient {
    fn new(value: f64, std_error: f64) -> Self {
        Coefficient { value, std_error, t_stat: value / std_error }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ErrorMethod {
    /// Classical OLS standard errors.
    Ols,
    Bootstrap { samples: usize, skipped: usize, resampling: Resampling },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum FitAdjustment {
    /// `1 − (1 − R²)(n − 1)/(n − 3)`.
    DegreesOfFreedom,
    /// Mean out-of-sample R² over contiguous folds.
    CrossValidation { folds: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    /// Intercept: the average normalized risk premium.
    pub a: Coefficient,
    /// Linear (trend-persistence) coefficient.
    pub b: Coefficient,
    /// Cubic (trend-reversion) coefficient.
    pub c: Coefficient,
    pub r_squared: f64,
    pub r_squared_adj: f64,
    pub n_obs: usize,
    pub error_method: ErrorMethod,
    pub adjustment: FitAdjustment,
}

impl RegressionReport {
    pub fn coefficients(&self) -> [f64; 3] {
        [self.a.value, self.b.value, self.c.value]
    }

    /// Kinetic coefficient `g = −6c` of the Langevin form.
    pub fn g(&self) -> f64 {
        -6.0 * self.c.value
    }

    /// Replaces the standard errors and t-statistics by bootstrap ones.
    pub fn with_bootstrap(mut self, boot: &BootstrapResult) -> Self {
        self.a = Coefficient::new(self.a.value, boot.std_errors[0]);
        self.b = Coefficient::new(self.b.value, boot.std_errors[1]);
        self.c = Coefficient::new(self.c.value, boot.std_errors[2]);
        self.error_method =
            ErrorMethod::Bootstrap { samples: boot.samples, skipped: boot.skipped, resampling: boot.resampling };
        self
    }

    /// Replaces the adjusted R² by the cross-validated one.
    pub fn with_cross_validation(mut self, cv: &CrossValidation) -> Self {
        self.r_squared_adj = cv.r_squared;
        self.adjustment = FitAdjustment::CrossValidation { folds: cv.folds };
        self
    }
}

/// OLS of `R(t+1)` on `(1, φ(t), φ(t)³)` for one market.
pub fn fit_cubic(trend: &TrendSeries, next_returns: &ReturnSeries) -> Result<RegressionReport, StatsError> {
    fit_cubic_data(&RegressionData::from_series(trend, next_returns)?)
}

/// OLS on a pooled sample, with classical standard errors.
pub fn fit_cubic_data(data: &RegressionData) -> Result<RegressionReport, StatsError> {
    let n = data.len();
    if n < MIN_OBSERVATIONS {
        return Err(StatsError::TooShort { needed: MIN_OBSERVATIONS, got: n });
    }
    let mut m = Moments::default();
    for o in &data.observations {
        m.add(o.trend, o.next_return);
    }
    let inv = linalg::inverse(&m.normal_matrix())?;
    let beta: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| inv[i][j] * m.t[j]).sum());
    let mean_y = m.t[0] / n as f64;
    let (mut rss, mut tss) = (0.0, 0.0);
    for o in &data.observations {
        rss += (o.next_return - predict(&beta, o.trend)).powi(2);
        tss += (o.next_return - mean_y).powi(2);
    }
    let dof = (n - 3) as f64;
    let sigma2 = rss / dof;
    let se: [f64; 3] = std::array::from_fn(|i| (sigma2 * inv[i][i]).max(0.0).sqrt());
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };
    Ok(RegressionReport {
        a: Coefficient::new(beta[0], se[0]),
        b: Coefficient::new(beta[1], se[1]),
        c: Coefficient::new(beta[2], se[2]),
        r_squared,
        r_squared_adj: 1.0 - (1.0 - r_squared) * (n - 1) as f64 / dof,
        n_obs: n,
        error_method: ErrorMethod::Ols,
        adjustment: FitAdjustment::DegreesOfFreedom,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LangevinFit {
    pub beta: f64,
    pub gamma: f64,
}

/// Solves `[⟨φ²⟩ ⟨φ⁴⟩; ⟨φ⁴⟩ ⟨φ⁶⟩]·(β, γ) = (⟨φR⟩, ⟨φ³R⟩)`, the no-intercept
/// regression on `(φ, φ³)`.
pub fn fit_langevin_pair(data: &RegressionData) -> Result<LangevinFit, StatsError> {
    if data.len() < MIN_OBSERVATIONS {
        return Err(StatsError::TooShort { needed: MIN_OBSERVATIONS, got: data.len() });
    }
    let mut m = Moments::default();
    for o in &data.observations {
        m.add(o.trend, o.next_return);
    }
    let s = &m.s;
    let [beta, gamma] = linalg::solve(&[[s[2], s[4]], [s[4], s[6]]], &[m.t[1], m.t[2]])?;
    Ok(LangevinFit { beta, gamma })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum Resampling {
    /// Days drawn i.i.d. with replacement.
    Days,
    /// Moving blocks of consecutive days.
    Blocks { length: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    /// `(a, b, c)` of every successful resample, in resample order.
    pub coefficients: Vec<[f64; 3]>,
    pub std_errors: [f64; 3],
    /// 2.5% and 97.5% percentiles per coefficient.
    pub intervals: [(f64, f64); 3],
    pub samples: usize,
    /// Rank-deficient resamples, left out of the statistics.
    pub skipped: usize,
    pub resampling: Resampling,
}

/// Bootstrap of the cubic regression over days. Resample `i` draws from
/// stream `STREAM_RESAMPLE_BASE + i` of `seed`, so the result does not depend
/// on the thread count.
pub fn bootstrap_errors(
    data: &RegressionData,
    n_samples: usize,
    seed: u64,
    resampling: Resampling,
) -> Result<BootstrapResult, StatsError> {
    if n_samples < MIN_BOOTSTRAP_SAMPLES {
        return Err(StatsError::InvalidArgument(format!(
            "need at least {MIN_BOOTSTRAP_SAMPLES} bootstrap samples, got {n_samples}"
        )));
    }
    if data.len() < MIN_OBSERVATIONS {
        return Err(StatsError::TooShort { needed: MIN_OBSERVATIONS, got: data.len() });
    }
    let day_moments: Vec<Moments> = data
        .days()
        .iter()
        .map(|idx| {
            let mut m = Moments::default();
            for &i in idx {
                let o = &data.observations[i];
                m.add(o.trend, o.next_return);
            }
            m
        })
        .collect();
    let n_days = day_moments.len();
    if let Resampling::Blocks { length } = resampling {
        if length == 0 || length > n_days {
            return Err(StatsError::InvalidArgument(format!("block length {length} outside 1..={n_days}")));
        }
    }
    let fits: Vec<Option<[f64; 3]>> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream_rng(seed, rng::STREAM_RESAMPLE_BASE + i as u64);
            let mut m = Moments::default();
            match resampling {
                Resampling::Days => {
                    for _ in 0..n_days {
                        m.merge(&day_moments[rng.random_range(0..n_days)]);
                    }
                }
                Resampling::Blocks { length } => {
                    let mut drawn = 0;
                    while drawn < n_days {
                        let start = rng.random_range(0..=n_days - length);
                        for d in &day_moments[start..start + length.min(n_days - drawn)] {
                            m.merge(d);
                        }
                        drawn += length;
                    }
                }
            }
            m.solve().ok()
        })
        .collect();
    let coefficients: Vec<[f64; 3]> = fits.iter().flatten().copied().collect();
    let skipped = n_samples - coefficients.len();
    if coefficients.len() < 2 {
        return Err(StatsError::RankDeficient(format!("{skipped} of {n_samples} resamples were degenerate")));
    }
    let k = coefficients.len() as f64;
    let mut std_errors = [0.0; 3];
    let mut intervals = [(0.0, 0.0); 3];
    for j in 0..3 {
        let mut col: Vec<f64> = coefficients.iter().map(|c| c[j]).collect();
        let mean = col.iter().sum::<f64>() / k;
        std_errors[j] = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
        col.sort_by(f64::total_cmp);
        intervals[j] = (percentile(&col, 0.025), percentile(&col, 0.975));
    }
    Ok(BootstrapResult { coefficients, std_errors, intervals, samples: n_samples, skipped, resampling })
}

/// Linear interpolation between order statistics of sorted data.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    /// Mean out-of-sample R² over folds.
    pub r_squared: f64,
    pub per_fold: Vec<f64>,
    pub folds: usize,
}

/// K-fold cross-validation over contiguous blocks of days.
///
/// For each fold the per-market premium is re-estimated from the training
/// days only and the trends are shifted accordingly (trends are linear in the
/// premium). The held-out fold is scored against the training mean:
/// `R²_oos = 1 − Σ(R − R̂)² / Σ(R − R̄_train)²`.
pub fn cross_validate(data: &RegressionData, folds: usize) -> Result<CrossValidation, StatsError> {
    if folds < 2 {
        return Err(StatsError::InvalidArgument(format!("need at least 2 folds, got {folds}")));
    }
    let needed = MIN_FOLD_SIZE * folds;
    if data.len() < needed {
        return Err(StatsError::TooShort { needed, got: data.len() });
    }
    let days = data.days();
    let n_days = days.len();
    if n_days < folds {
        return Err(StatsError::TooShort { needed: folds, got: n_days });
    }
    let fold_of_day = |d: usize| d * folds / n_days;
    let mut in_fold = vec![0usize; data.len()];
    for (d, idx) in days.iter().enumerate() {
        for &i in idx {
            in_fold[i] = fold_of_day(d);
        }
    }
    let per_fold = (0..folds)
        .into_par_iter()
        .map(|f| score_fold(data, &in_fold, f))
        .collect::<Result<Vec<f64>, StatsError>>()?;
    let r_squared = per_fold.iter().sum::<f64>() / folds as f64;
    Ok(CrossValidation { r_squared, per_fold, folds })
}

fn score_fold(data: &RegressionData, in_fold: &[usize], fold: usize) -> Result<f64, StatsError> {
    let n_markets = data.n_markets();
    let mut sums = vec![(0.0, 0usize); n_markets];
    for (o, &f) in data.observations.iter().zip(in_fold) {
        if f != fold {
            sums[o.market].0 += o.next_return;
            sums[o.market].1 += 1;
        }
    }
    let shift: Vec<f64> = (0..n_markets)
        .map(|m| {
            let (s, k) = sums[m];
            if k == 0 {
                0.0
            } else {
                data.premiums[m] - s / k as f64
            }
        })
        .collect();
    let adjusted = |o: &Observation| o.trend + shift[o.market] * o.cum_weight;
    let mut m = Moments::default();
    for (o, &f) in data.observations.iter().zip(in_fold) {
        if f != fold {
            m.add(adjusted(o), o.next_return);
        }
    }
    let beta = m.solve()?;
    let train_mean = m.t[0] / m.s[0];
    let (mut rss, mut tss) = (0.0, 0.0);
    for (o, &f) in data.observations.iter().zip(in_fold) {
        if f == fold {
            rss += (o.next_return - predict(&beta, adjusted(o))).powi(2);
            tss += (o.next_return - train_mean).powi(2);
        }
    }
    if tss == 0.0 {
        return Ok(if rss == 0.0 { 1.0 } else { f64::NEG_INFINITY });
    }
    Ok(1.0 - rss / tss)
}
