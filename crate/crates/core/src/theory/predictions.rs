//! Observable consequences of the propagator: return autocorrelations, trend
//! variances and the adjacent-window correlation.
//!
//! The Laplace-type integrals run over `(0, ∞)`. In the scaling regime the
//! power-law form is used on the whole half line, which is accurate only when
//! the horizon is well inside the scaling window; horizons above
//! `τ·SCALING_HORIZON_FRACTION` are therefore rejected there.

use serde::{Deserialize, Serialize};

use super::quadrature::{integrate, integrate_to_infinity, QuadOptions};
use super::{PropagatorModel, Regime, TheoryError};

/// Largest horizon, as a fraction of `τ`, accepted in the scaling regime.
pub const SCALING_HORIZON_FRACTION: f64 = 0.25;

/// Scales `k` of the plotting grid `T = 2^k`.
pub const CURVE_SCALES: std::ops::RangeInclusive<u32> = 1..=13;

const QUAD_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendEstimator {
    /// Exponentially weighted `φ_ω` with `ω = 2/T`.
    Phi,
    /// Flat window `φ̃_T`.
    Tilde,
}

impl std::str::FromStr for TrendEstimator {
    type Err = TheoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "phi" => Ok(TrendEstimator::Phi),
            "tilde" | "step" => Ok(TrendEstimator::Tilde),
            other => Err(TheoryError::InvalidArgument(format!("unknown estimator {other:?}"))),
        }
    }
}

impl std::fmt::Display for TrendEstimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TrendEstimator::Phi => "phi",
            TrendEstimator::Tilde => "tilde",
        })
    }
}

fn check_positive(name: &str, x: f64) -> Result<(), TheoryError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(TheoryError::InvalidArgument(format!("{name} must be positive and finite, got {x}")))
    }
}

fn check_scaling_horizon(model: &PropagatorModel, horizon: f64) -> Result<(), TheoryError> {
    if model.regime == Regime::Scaling && horizon > SCALING_HORIZON_FRACTION * model.tau {
        return Err(TheoryError::Domain(format!(
            "horizon {horizon} is not small against tau = {} in the scaling regime",
            model.tau
        )));
    }
    Ok(())
}

/// `∫₀^∞ g(ζ)·e^{−ωζ} dζ` where `g` may behave like `ζ^{κ−1}` at the origin.
///
/// Near zero `ζ = c·s^{1/κ}` removes the power singularity; beyond `c` the
/// half line is mapped onto `(0, 1]`, with a break at the regime knee.
fn laplace<G: Fn(f64) -> f64>(model: &PropagatorModel, omega: f64, g: G) -> Result<f64, TheoryError> {
    let opts = QuadOptions { rel_tol: QUAD_REL_TOL, ..QuadOptions::default() };
    let f = |z: f64| g(z) * (-omega * z).exp();
    let knee = model.knee();
    let c = match knee {
        Some(k) => k.min(1.0 / omega),
        None => 1.0 / omega,
    };
    let p = 1.0 / model.kappa;
    let head = integrate(
        |s: f64| {
            let z = c * s.powf(p);
            f(z) * c * p * s.powf(p - 1.0)
        },
        0.0,
        1.0,
        opts,
    )?
    .value;
    let tail_start = match knee {
        Some(k) if k > c => k,
        _ => c,
    };
    let middle = if tail_start > c { integrate(&f, c, tail_start, opts)?.value } else { 0.0 };
    let rate = match model.regime {
        Regime::Scaling => omega,
        _ => omega + 1.0 / model.tau,
    };
    let tail = integrate_to_infinity(&f, tail_start, rate, opts)?.value;
    Ok(head + middle + tail)
}

/// Return autocorrelation at lag `t`: `−Δ̈(t)`.
pub fn predicted_return_autocorrelation(model: &PropagatorModel, t: f64) -> Result<f64, TheoryError> {
    let (_, second) = model.derivatives(t)?;
    Ok(-second)
}

/// Correlation between the trend `φ_ω` and the next return,
/// `−2ω^{3/2} ∫₀^∞ ζ e^{−ωζ} Δ̈(ζ) dζ`, by quadrature.
pub fn predicted_trend_return_correlation(model: &PropagatorModel, omega: f64) -> Result<f64, TheoryError> {
    check_positive("omega", omega)?;
    check_scaling_horizon(model, 2.0 / omega)?;
    if model.kappa == 1.0 && model.regime == Regime::Scaling {
        return Ok(0.0);
    }
    let integral = laplace(model, omega, |z| z * model.raw_derivatives(z).1)?;
    Ok(-2.0 * omega.powf(1.5) * integral)
}

/// Variance of the unit-normalized trend strength at horizon `T`.
///
/// `Tilde` is `(2/T)(Δ(0) − Δ(T))`; `Phi` is
/// `−2ω³ ∫₀^∞ e^{−ωu} ∫₀^u v Δ̇(v) dv du = −2ω² ∫₀^∞ v e^{−ωv} Δ̇(v) dv`
/// with `ω = 2/T`, evaluated by quadrature.
pub fn predicted_trend_variance(
    model: &PropagatorModel,
    horizon: f64,
    estimator: TrendEstimator,
) -> Result<f64, TheoryError> {
    check_positive("horizon", horizon)?;
    check_scaling_horizon(model, horizon)?;
    match estimator {
        TrendEstimator::Tilde => Ok(2.0 / horizon * (model.value(0.0)? - model.value(horizon)?)),
        TrendEstimator::Phi => {
            let omega = 2.0 / horizon;
            let integral = laplace(model, omega, |v| v * model.raw_derivatives(v).0)?;
            Ok(-2.0 * omega * omega * integral)
        }
    }
}

/// Correlation of flat-window trends over two adjacent windows of length `T`,
/// `−(1/T)[Δ(0) − 2Δ(T) + Δ(2T)]`.
pub fn predicted_adjacent_window_correlation(model: &PropagatorModel, horizon: f64) -> Result<f64, TheoryError> {
    check_positive("horizon", horizon)?;
    let d0 = model.value(0.0)?;
    let d1 = model.value(horizon)?;
    let d2 = model.value(2.0 * horizon)?;
    Ok(-(d0 - 2.0 * d1 + d2) / horizon)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Curve {
    /// `−Δ̈(T)`.
    ReturnAutocorrelation,
    /// Trend/next-return correlation at `ω = 2/T`.
    TrendReturnCorrelation,
    TrendVariance(TrendEstimator),
    AdjacentWindowCorrelation,
}

impl Curve {
    pub fn name(&self) -> String {
        match self {
            Curve::ReturnAutocorrelation => "return_autocorrelation".into(),
            Curve::TrendReturnCorrelation => "trend_return_correlation".into(),
            Curve::TrendVariance(e) => format!("trend_variance_{e}"),
            Curve::AdjacentWindowCorrelation => "adjacent_window_correlation".into(),
        }
    }

    pub fn eval(&self, model: &PropagatorModel, horizon: f64) -> Result<f64, TheoryError> {
        match self {
            Curve::ReturnAutocorrelation => predicted_return_autocorrelation(model, horizon),
            Curve::TrendReturnCorrelation => predicted_trend_return_correlation(model, 2.0 / horizon),
            Curve::TrendVariance(e) => predicted_trend_variance(model, horizon, *e),
            Curve::AdjacentWindowCorrelation => predicted_adjacent_window_correlation(model, horizon),
        }
    }
}

/// `(T, prediction)` for `T = 2^k`. Horizons outside the model's domain are
/// skipped rather than reported as errors; other errors propagate.
pub fn prediction_curve(
    model: &PropagatorModel,
    curve: Curve,
    scales: impl IntoIterator<Item = u32>,
) -> Result<Vec<(f64, f64)>, TheoryError> {
    let mut out = Vec::new();
    for k in scales {
        let t = 2f64.powi(k as i32);
        match curve.eval(model, t) {
            Ok(v) => out.push((t, v)),
            Err(TheoryError::Domain(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
