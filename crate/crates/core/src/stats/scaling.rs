//! Log-log scaling fits: generalized Hurst exponents from moments of
//! increments, and `κ` from the decay of trend variances with the horizon.

use serde::{Deserialize, Serialize};

use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// The process itself, e.g. `π(t)` or a log price.
    Levels,
    /// Its increments, e.g. returns; summed before use.
    Increments,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    /// `(scale, statistic)` as passed to the regression.
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    /// `H_q` for moment scaling, `κ` for variance fits.
    pub exponent: f64,
    pub exponent_se: f64,
    /// Residuals of the linear fit, one per point.
    pub residuals: Vec<f64>,
    /// Moment order, for moment scaling.
    pub q: Option<f64>,
}

impl ScalingFit {
    pub fn max_abs_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

const MIN_POINTS: usize = 3;

struct Line {
    slope: f64,
    intercept: f64,
    residuals: Vec<f64>,
    /// `(xᵢ − x̄)/Sxx`: weights of the slope as a linear combination of `y`.
    slope_weights: Vec<f64>,
}

fn ols_line(x: &[f64], y: &[f64]) -> Result<Line, StatsError> {
    let n = x.len() as f64;
    let xm = x.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - xm).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(StatsError::Degenerate("all scales coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - xm) * (b - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let residuals = x.iter().zip(y).map(|(a, b)| b - intercept - slope * a).collect();
    let slope_weights = x.iter().map(|v| (v - xm) / sxx).collect();
    Ok(Line { slope, intercept, residuals, slope_weights })
}

fn residual_slope_se(line: &Line) -> f64 {
    let n = line.residuals.len();
    let rss: f64 = line.residuals.iter().map(|r| r * r).sum();
    let sxx_inv: f64 = line.slope_weights.iter().map(|w| w * w).sum();
    (rss / (n - 2) as f64 * sxx_inv).sqrt()
}

fn check_points(points: &[(f64, f64)]) -> Result<(), StatsError> {
    if points.len() < MIN_POINTS {
        return Err(StatsError::TooShort { needed: MIN_POINTS, got: points.len() });
    }
    if let Some((index, &(_, value))) = points.iter().enumerate().find(|(_, p)| !(p.1 > 0.0)) {
        return Err(StatsError::NonPositive { index, value });
    }
    Ok(())
}

/// `κ` from trend variances at horizons `T = 2^k`: OLS of `ln var` on
/// `k·ln 2`, whose slope is `κ − 1`.
pub fn fit_kappa(variances_by_scale: &[(f64, f64)]) -> Result<ScalingFit, StatsError> {
    check_points(variances_by_scale)?;
    let x: Vec<f64> = variances_by_scale.iter().map(|p| p.0 * std::f64::consts::LN_2).collect();
    let y: Vec<f64> = variances_by_scale.iter().map(|p| p.1.ln()).collect();
    let line = ols_line(&x, &y)?;
    let se = residual_slope_se(&line);
    Ok(ScalingFit {
        points: variances_by_scale.to_vec(),
        slope: line.slope,
        intercept: line.intercept,
        slope_se: se,
        exponent: 1.0 + line.slope,
        exponent_se: se,
        residuals: line.residuals,
        q: None,
    })
}

/// First-order form `var ≈ 1 − (1 − κ)·k·ln 2`, valid only while
/// `(1 − κ)·k·ln 2 ≪ 1`, i.e. for `κ` close to one.
pub fn fit_kappa_linear(variances_by_scale: &[(f64, f64)]) -> Result<ScalingFit, StatsError> {
    check_points(variances_by_scale)?;
    let x: Vec<f64> = variances_by_scale.iter().map(|p| p.0 * std::f64::consts::LN_2).collect();
    let y: Vec<f64> = variances_by_scale.iter().map(|p| p.1).collect();
    let line = ols_line(&x, &y)?;
    let se = residual_slope_se(&line);
    Ok(ScalingFit {
        points: variances_by_scale.to_vec(),
        slope: line.slope,
        intercept: line.intercept,
        slope_se: se,
        exponent: 1.0 + line.slope,
        exponent_se: se,
        residuals: line.residuals,
        q: None,
    })
}

fn levels(series: &[f64], kind: SeriesKind) -> Vec<f64> {
    match kind {
        SeriesKind::Levels => series.to_vec(),
        SeriesKind::Increments => std::iter::once(0.0)
            .chain(series.iter().scan(0.0, |acc, r| {
                *acc += r;
                Some(*acc)
            }))
            .collect(),
    }
}

/// Generalized Hurst exponents `H_q` from `M_q(T) = ⟨|π(t+T) − π(t)|^q⟩`.
///
/// Moments use every overlapping window. `ln M_q` is regressed on `ln T`
/// and `H_q = slope/q`. The slope's standard error propagates the sampling
/// error of each `ln M_q(T)` with an effective sample size of `(n − T)/T`,
/// treating horizons as independent.
pub fn moment_scaling(
    series: &[f64],
    kind: SeriesKind,
    qs: &[f64],
    horizons: &[usize],
) -> Result<Vec<ScalingFit>, StatsError> {
    if horizons.len() < MIN_POINTS {
        return Err(StatsError::TooShort { needed: MIN_POINTS, got: horizons.len() });
    }
    if let Some(&q) = qs.iter().find(|q| !(**q > 0.0)) {
        return Err(StatsError::InvalidArgument(format!("moment orders must be positive, got {q}")));
    }
    if horizons.contains(&0) {
        return Err(StatsError::InvalidArgument("horizons must be positive".into()));
    }
    let path = levels(series, kind);
    let max_t = *horizons.iter().max().unwrap();
    let needed = 10 * max_t;
    if path.len() < needed {
        return Err(StatsError::TooShort { needed, got: path.len() });
    }
    // per horizon, per q: (mean |d|^q, relative variance of the mean)
    let stats: Vec<Vec<(f64, f64)>> = horizons
        .iter()
        .map(|&t| {
            let d: Vec<f64> = path.windows(t + 1).map(|w| (w[t] - w[0]).abs()).collect();
            let n_eff = d.len() as f64 / t as f64;
            qs.iter()
                .map(|&q| {
                    let (s1, s2) = d.iter().fold((0.0, 0.0), |(a, b), v| {
                        let p = v.powf(q);
                        (a + p, b + p * p)
                    });
                    let m1 = s1 / d.len() as f64;
                    let m2 = s2 / d.len() as f64;
                    (m1, (m2 / (m1 * m1) - 1.0).max(0.0) / n_eff)
                })
                .collect()
        })
        .collect();
    let x: Vec<f64> = horizons.iter().map(|&t| (t as f64).ln()).collect();
    qs.iter()
        .enumerate()
        .map(|(j, &q)| {
            let points: Vec<(f64, f64)> = horizons.iter().zip(&stats).map(|(&t, s)| (t as f64, s[j].0)).collect();
            check_points(&points)?;
            let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
            let line = ols_line(&x, &y)?;
            let var: f64 = line.slope_weights.iter().zip(&stats).map(|(w, s)| w * w * s[j].1).sum();
            let slope_se = var.sqrt();
            Ok(ScalingFit {
                points,
                slope: line.slope,
                intercept: line.intercept,
                slope_se,
                exponent: line.slope / q,
                exponent_se: slope_se / q,
                residuals: line.residuals,
                q: Some(q),
            })
        })
        .collect()
}

/// Variance of flat-window trends `(π(t+T) − π(t))/√T` at `T = 2^k`, pooled
/// over several independent level paths, using every overlapping window.
/// The increments are taken to have zero mean.
pub fn tilde_variance(paths: &[Vec<f64>], scales: &[u32]) -> Result<Vec<(f64, f64)>, StatsError> {
    scales
        .iter()
        .map(|&k| {
            let t = 1usize << k;
            let (mut sum, mut count) = (0.0, 0usize);
            for p in paths {
                for w in p.windows(t + 1) {
                    sum += (w[t] - w[0]).powi(2);
                    count += 1;
                }
            }
            if count == 0 {
                return Err(StatsError::TooShort { needed: t + 1, got: paths.iter().map(Vec::len).max().unwrap_or(0) });
            }
            Ok((k as f64, sum / count as f64 / t as f64))
        })
        .collect()
}
