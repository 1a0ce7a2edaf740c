//! Normalized returns and trend strengths.
//!
//! A trend strength is a weighted sum of past and present excess returns,
//! `φ(t) = Σ_n w(n)·R̂(t−n)`, with weights normalized to `Σ w² = 1` so that
//! on independent unit-variance returns the trend has unit variance and reads
//! as a t-statistic.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TrendError {
    #[error("need at least {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("price at index {index} is not positive: {value}")]
    NonPositivePrice { index: usize, value: f64 },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("returns have zero variance")]
    ZeroVariance,
    #[error("invalid horizon {0}")]
    InvalidHorizon(f64),
}

/// Log-returns `ln(P_t / P_{t−1})`.
pub fn log_returns(prices: &[f64]) -> Result<Vec<f64>, TrendError> {
    if prices.len() < 2 {
        return Err(TrendError::TooShort { needed: 2, got: prices.len() });
    }
    for (index, &value) in prices.iter().enumerate() {
        if !value.is_finite() {
            return Err(TrendError::NonFinite(index));
        }
        if value <= 0.0 {
            return Err(TrendError::NonPositivePrice { index, value });
        }
    }
    Ok(prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
}

/// Mean and population standard deviation.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Returns `R(t) = r(t)/σ` together with the constants that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    pub values: Vec<f64>,
    /// Mean raw return (daily risk premium).
    pub mu: f64,
    /// Raw return standard deviation.
    pub sigma: f64,
}

impl ReturnSeries {
    /// Scales raw returns to unit (population) variance; `μ` and `σ` come
    /// from the full sample.
    pub fn normalize(raw: &[f64]) -> Result<Self, TrendError> {
        if raw.len() < 2 {
            return Err(TrendError::TooShort { needed: 2, got: raw.len() });
        }
        if let Some(i) = raw.iter().position(|v| !v.is_finite()) {
            return Err(TrendError::NonFinite(i));
        }
        let (mu, sigma) = mean_std(raw);
        if !(sigma > 0.0) || sigma < 1e-300 {
            return Err(TrendError::ZeroVariance);
        }
        Ok(ReturnSeries { values: raw.iter().map(|r| r / sigma).collect(), mu, sigma })
    }

    /// Already-normalized values with no risk premium (`μ = 0`, `σ = 1`).
    pub fn unnormalized(values: Vec<f64>) -> Self {
        ReturnSeries { values, mu: 0.0, sigma: 1.0 }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Normalized premium `μ/σ`.
    pub fn premium(&self) -> f64 {
        self.mu / self.sigma
    }

    /// Excess returns `R̂ = R − μ/σ`.
    pub fn excess(&self) -> Vec<f64> {
        self.excess_with(self.premium())
    }

    pub fn excess_with(&self, premium: f64) -> Vec<f64> {
        self.values.iter().map(|r| r - premium).collect()
    }

    /// Normalized premium estimated from a subset of days only, for
    /// out-of-sample validation.
    pub fn premium_from(&self, days: impl IntoIterator<Item = usize>) -> f64 {
        let (sum, n) = days.into_iter().fold((0.0, 0usize), |(s, n), d| (s + self.values[d], n + 1));
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }
}

/// Normalized daily log-returns from a price series (at least 3 prices).
pub fn normalize_returns(prices: &[f64]) -> Result<ReturnSeries, TrendError> {
    if prices.len() < 3 {
        return Err(TrendError::TooShort { needed: 3, got: prices.len() });
    }
    ReturnSeries::normalize(&log_returns(prices)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    /// Equal weights over the last `T` days.
    Step,
    /// `M_T·e^{−2n/T}`.
    Psi,
    /// `N_T·(n+1)·e^{−2n/T}`.
    Phi,
}

impl std::str::FromStr for WeightKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "step" | "tilde" => Ok(WeightKind::Step),
            "psi" => Ok(WeightKind::Psi),
            "phi" => Ok(WeightKind::Phi),
            other => Err(format!("unknown weight kind `{other}` (expected step, psi or phi)")),
        }
    }
}

impl std::fmt::Display for WeightKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WeightKind::Step => "step",
            WeightKind::Psi => "psi",
            WeightKind::Phi => "phi",
        })
    }
}

/// Weights beyond the point where `w(n) < TRUNCATION·w(peak)` are dropped.
pub const TRUNCATION: f64 = 1e-12;
/// Trend values are flagged as warm-up until the weight mass `Σ w²` that
/// falls before the start of the series is at most this much.
pub const WARMUP_TAIL_MASS: f64 = 1e-3;

/// `M_T = √(1 − e^{−4/T})`.
pub fn psi_normalization(horizon: f64) -> f64 {
    (-(-4.0 / horizon).exp_m1()).sqrt()
}

/// `N_T = (1 − e^{−4/T})² / √(1 − e^{−8/T})`.
pub fn phi_normalization(horizon: f64) -> f64 {
    let a = -(-4.0 / horizon).exp_m1();
    let b = -(-8.0 / horizon).exp_m1();
    a * a / b.sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    kind: WeightKind,
    horizon: f64,
    weights: Vec<f64>,
}

/// Serializable summary of a weight function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightDescriptor {
    pub kind: WeightKind,
    pub horizon: f64,
    pub n_max: usize,
    pub truncation: f64,
    pub warmup: usize,
    pub average_lookback: f64,
}

impl WeightFunction {
    pub fn new(kind: WeightKind, horizon: f64) -> Result<Self, TrendError> {
        match kind {
            WeightKind::Step => {
                if horizon.fract() != 0.0 || horizon < 1.0 || !horizon.is_finite() {
                    return Err(TrendError::InvalidHorizon(horizon));
                }
                Ok(Self::step(horizon as usize))
            }
            WeightKind::Psi => Self::psi(horizon),
            WeightKind::Phi => Self::phi(horizon),
        }
    }

    /// `w(n) = T^{−1/2}` for `n < T`.
    pub fn step(horizon: usize) -> Self {
        let horizon = horizon.max(1);
        let w = (horizon as f64).powf(-0.5);
        Self::renormalized(WeightKind::Step, horizon as f64, vec![w; horizon])
    }

    pub fn psi(horizon: f64) -> Result<Self, TrendError> {
        check_horizon(horizon)?;
        let m = psi_normalization(horizon);
        let x = (-2.0 / horizon).exp();
        let mut weights = vec![m];
        let mut ratio = 1.0;
        loop {
            ratio *= x;
            if ratio < TRUNCATION {
                break;
            }
            weights.push(m * ratio);
        }
        Ok(Self::renormalized(WeightKind::Psi, horizon, weights))
    }

    pub fn phi(horizon: f64) -> Result<Self, TrendError> {
        check_horizon(horizon)?;
        let norm = phi_normalization(horizon);
        let x = (-2.0 / horizon).exp();
        let peak_n = (horizon / 2.0 - 1.0).max(0.0);
        let mut peak: f64 = 0.0;
        let mut weights = Vec::new();
        let mut pow = 1.0;
        let mut n = 0usize;
        loop {
            let shape = (n as f64 + 1.0) * pow;
            peak = peak.max(shape);
            if n as f64 > peak_n && shape < TRUNCATION * peak {
                break;
            }
            weights.push(norm * shape);
            pow *= x;
            n += 1;
        }
        Ok(Self::renormalized(WeightKind::Phi, horizon, weights))
    }

    fn renormalized(kind: WeightKind, horizon: f64, mut weights: Vec<f64>) -> Self {
        let scale = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
        for w in &mut weights {
            *w /= scale;
        }
        WeightFunction { kind, horizon, weights }
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Last retained lag.
    pub fn n_max(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum()
    }

    /// `Σ_{n=0}^{min(t, n_max)} w(n)`: the response of the trend at `t` to a
    /// unit shift in every return up to `t`.
    pub fn cumulative_weight(&self, t: usize) -> f64 {
        self.weights[..=t.min(self.n_max())].iter().sum()
    }

    /// Average lookback `E[n+1]` with the weights as the distribution.
    pub fn average_lookback(&self) -> f64 {
        let total: f64 = self.weights.iter().sum();
        self.weights.iter().enumerate().map(|(n, w)| (n as f64 + 1.0) * w).sum::<f64>() / total
    }

    /// First index at which at most [`WARMUP_TAIL_MASS`] of `Σ w²` lies before
    /// the start of the series. Exact (`T − 1`) for the step function.
    pub fn warmup(&self) -> usize {
        if self.kind == WeightKind::Step {
            return self.n_max();
        }
        let mut tail = 1.0;
        for (n, w) in self.weights.iter().enumerate() {
            tail -= w * w;
            if tail <= WARMUP_TAIL_MASS {
                return n;
            }
        }
        self.n_max()
    }

    pub fn descriptor(&self) -> WeightDescriptor {
        WeightDescriptor {
            kind: self.kind,
            horizon: self.horizon,
            n_max: self.n_max(),
            truncation: TRUNCATION,
            warmup: self.warmup(),
            average_lookback: self.average_lookback(),
        }
    }
}

fn check_horizon(horizon: f64) -> Result<(), TrendError> {
    if horizon > 0.0 && horizon.is_finite() {
        Ok(())
    } else {
        Err(TrendError::InvalidHorizon(horizon))
    }
}

/// Trend strengths aligned with the return index: `values[t]` uses returns at
/// `t, t−1, …` only.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendSeries {
    pub values: Vec<f64>,
    pub weights: WeightFunction,
    /// Normalized premium `μ/σ` subtracted from the returns.
    pub premium: f64,
}

impl TrendSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.weights.horizon()
    }

    /// Values before this index lack history and are excluded from
    /// regressions by default.
    pub fn warmup(&self) -> usize {
        self.weights.warmup()
    }

    pub fn is_warmup(&self, t: usize) -> bool {
        t < self.warmup()
    }

    /// The same trends with a different premium subtracted, using linearity:
    /// `φ'(t) = φ(t) + (premium − new)·Σ_{n≤t} w(n)`.
    pub fn with_premium(&self, premium: f64) -> TrendSeries {
        let delta = self.premium - premium;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(t, v)| v + delta * self.weights.cumulative_weight(t))
            .collect();
        TrendSeries { values, weights: self.weights.clone(), premium }
    }
}

/// Direct convolution of the excess returns with the weights.
pub fn trend_strength(returns: &ReturnSeries, weights: &WeightFunction) -> TrendSeries {
    let premium = returns.premium();
    let excess = returns.excess();
    let w = weights.weights();
    let values = (0..excess.len())
        .map(|t| {
            let lags = t.min(weights.n_max());
            (0..=lags).map(|n| w[n] * excess[t - n]).sum()
        })
        .collect();
    TrendSeries { values, weights: weights.clone(), premium }
}

/// Recursive evaluation of the same trends.
///
/// `ψ`: `A(t) = x·A(t−1) + R̂(t)`, `ψ = M_T·A` with `x = e^{−2/T}`.
/// `φ`: additionally `B(t) = x·(B(t−1) + A(t−1))`, `φ = N_T·(A + B)`.
/// Step: running window sum scaled by `T^{−1/2}`.
///
/// The recursion carries the untruncated weights, so it agrees with
/// [`trend_strength`] to the truncation level once `t` exceeds `n_max`.
pub fn trend_strength_recursive(returns: &ReturnSeries, horizon: f64, kind: WeightKind) -> Result<TrendSeries, TrendError> {
    let weights = WeightFunction::new(kind, horizon)?;
    let premium = returns.premium();
    let excess = returns.excess();
    let x = (-2.0 / horizon).exp();
    let mut values = Vec::with_capacity(excess.len());
    match kind {
        WeightKind::Psi => {
            let m = psi_normalization(horizon);
            let mut a = 0.0;
            for r in &excess {
                a = x * a + r;
                values.push(m * a);
            }
        }
        WeightKind::Phi => {
            let norm = phi_normalization(horizon);
            let (mut a, mut b) = (0.0, 0.0);
            for r in &excess {
                b = x * (b + a);
                a = x * a + r;
                values.push(norm * (a + b));
            }
        }
        WeightKind::Step => {
            let len = horizon as usize;
            let scale = horizon.powf(-0.5);
            let mut sum = 0.0;
            for (t, r) in excess.iter().enumerate() {
                sum += r;
                if t >= len {
                    sum -= excess[t - len];
                }
                values.push(scale * sum);
            }
        }
    }
    Ok(TrendSeries { values, weights, premium })
}

/// Step-function trends over consecutive non-overlapping windows of length
/// `T`, laid out backwards from the last return. Each pair is
/// `(φ̃ of a window, φ̃ of the window before it)`, in chronological order.
pub fn adjacent_window_trends(returns: &ReturnSeries, horizon: usize) -> Result<Vec<(f64, f64)>, TrendError> {
    if horizon == 0 {
        return Err(TrendError::InvalidHorizon(0.0));
    }
    if returns.len() < 2 * horizon {
        return Err(TrendError::TooShort { needed: 2 * horizon, got: returns.len() });
    }
    let excess = returns.excess();
    let n_windows = excess.len() / horizon;
    let start = excess.len() - n_windows * horizon;
    let scale = (horizon as f64).powf(-0.5);
    let trends: Vec<f64> = excess[start..].chunks_exact(horizon).map(|c| scale * c.iter().sum::<f64>()).collect();
    Ok(trends.windows(2).map(|w| (w[1], w[0])).collect())
}
