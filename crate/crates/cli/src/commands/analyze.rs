//! Empirical pipeline on daily prices.
//!
//! Returns are normalized per market, trends are computed for every horizon
//! `T = 2^k`, and the next-day return is regressed on `(1, φ, φ³)`:
//!
//! - per horizon, pooled across markets;
//! - pooled across markets and horizons (the coefficient table);
//! - on the equally weighted mean of all horizons' trends (the aggregated R²).
//!
//! Errors are bootstrapped over days and the adjusted R² is cross-validated.
//! The per-horizon `b` is fitted by a parabola in `k`, and the scaling of
//! trend variances and of return moments gives `κ`, the dimension and the
//! generalized Hurst exponents.

use std::collections::BTreeMap;
use std::path::PathBuf;

use latgas::rng::derive_seed;
use latgas::stats::{
    basis_points, bootstrap_errors, cross_validate, fit_cubic_data, fit_kappa, fit_parabolic_b, moment_scaling,
    tilde_variance, Coefficient, Observation, ParabolicFit, RegressionData, RegressionReport, ScalingFit, SeriesKind,
    MIN_FOLD_SIZE, MIN_OBSERVATIONS,
};
use latgas::theory::dimension_for_kappa;
use latgas::trend::{adjacent_window_trends, trend_strength_recursive, ReturnSeries, TrendSeries, WeightFunction};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{AnalyzeConfig, Config};
use crate::data::{load_price_csv, Gap};
use crate::output::{fmt_f64, fmt_opt, InputRecord, OutDir, Provenance};
use crate::CliError;

// Seed indices of the two multi-horizon bootstraps; per-horizon ones use k.
const POOLED_STREAM: u64 = 1 << 32;
const AGGREGATED_STREAM: u64 = (1 << 32) + 1;

pub struct Market {
    pub name: String,
    pub returns: ReturnSeries,
    /// Global day index of each return.
    pub days: Vec<usize>,
    pub first: String,
    pub last: String,
    pub n_prices: usize,
    pub gaps: Vec<Gap>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MarketSummary {
    pub name: String,
    pub first: String,
    pub last: String,
    pub n_prices: usize,
    pub gaps: Vec<Gap>,
    /// Mean and standard deviation of raw daily log-returns.
    pub mu: f64,
    pub sigma: f64,
}

/// Loads every input and places all markets on one calendar.
pub fn load_markets(settings: &AnalyzeConfig) -> Result<(Vec<Market>, Vec<InputRecord>), CliError> {
    if settings.inputs.is_empty() {
        return Err(CliError::Validation("analyze needs at least one price file".into()));
    }
    let tables =
        settings.inputs.iter().map(|p| load_price_csv(p, settings.schema)).collect::<Result<Vec<_>, _>>()?;
    let mut calendar: Vec<_> = tables.iter().flat_map(|t| t.calendar.iter().copied()).collect();
    calendar.sort_unstable();
    calendar.dedup();
    let inputs = tables
        .iter()
        .map(|t| InputRecord { path: t.source.display().to_string(), sha256: t.sha256.clone() })
        .collect();
    let mut markets: Vec<Market> = Vec::new();
    for table in tables {
        for m in table.markets {
            if markets.iter().any(|x| x.name == m.name) {
                return Err(CliError::Validation(format!("market `{}` appears in more than one input", m.name)));
            }
            if m.len() < 3 {
                log::warn!("market `{}` has {} prices and is skipped", m.name, m.len());
                continue;
            }
            let returns = match ReturnSeries::normalize(&m.log_returns()) {
                Ok(r) => r,
                Err(e) => {
                    log::warn!("market `{}` is skipped: {e}", m.name);
                    continue;
                }
            };
            let days = m.dates[1..].iter().map(|d| calendar.binary_search(d).expect("date is in calendar")).collect();
            markets.push(Market {
                first: m.dates[0].to_string(),
                last: m.dates[m.len() - 1].to_string(),
                n_prices: m.len(),
                name: m.name,
                returns,
                days,
                gaps: m.gaps,
            });
        }
    }
    if markets.is_empty() {
        return Err(CliError::Validation("no market has enough prices".into()));
    }
    Ok((markets, inputs))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    /// `sd/√n`.
    pub std_error: f64,
    pub n: usize,
}

impl MeanEstimate {
    fn of(values: impl Iterator<Item = f64>) -> Option<Self> {
        let (mut n, mut s1, mut s2) = (0usize, 0.0, 0.0);
        for v in values {
            n += 1;
            s1 += v;
            s2 += v * v;
        }
        if n < 2 {
            return None;
        }
        let mean = s1 / n as f64;
        let var = ((s2 - n as f64 * mean * mean) / (n - 1) as f64).max(0.0);
        Some(MeanEstimate { mean, std_error: (var / n as f64).sqrt(), n })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitSummary {
    /// Bootstrap errors and cross-validated adjusted R².
    pub report: RegressionReport,
    /// Classical OLS errors of the same fit, for comparison.
    pub ols: [Coefficient; 3],
    /// Bootstrap 2.5% and 97.5% percentiles of `(a, b, c)`.
    pub intervals: [(f64, f64); 3],
    pub cv_per_fold: Vec<f64>,
    pub n_markets: usize,
}

fn fit_all(data: &RegressionData, settings: &AnalyzeConfig, seed: u64) -> Result<FitSummary, CliError> {
    let ols = fit_cubic_data(data)?;
    let boot = bootstrap_errors(data, settings.bootstrap, seed, settings.resampling())?;
    let cv = cross_validate(data, settings.folds)?;
    if boot.skipped > 0 {
        log::warn!("{} of {} bootstrap resamples were degenerate", boot.skipped, boot.samples);
    }
    Ok(FitSummary {
        ols: [ols.a, ols.b, ols.c],
        report: ols.with_bootstrap(&boot).with_cross_validation(&cv),
        intervals: boot.intervals,
        cv_per_fold: cv.per_fold,
        n_markets: data.n_markets(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaleResult {
    pub k: u32,
    pub horizon: f64,
    pub fit: FitSummary,
    /// `⟨φ(t)·R̂(t+1)⟩` pooled over markets.
    pub trend_return: Option<MeanEstimate>,
    /// `⟨φ²⟩` over the regression sample.
    pub trend_variance: f64,
    /// `⟨φ̃_T(t)·φ̃_T(t−T)⟩` over adjacent non-overlapping windows.
    pub adjacent_window: Option<MeanEstimate>,
    /// Flat-window trend variance from overlapping windows.
    pub tilde_variance: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Dropped {
    pub k: u32,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct HurstSummary {
    pub q: f64,
    /// Mean of the per-market exponents.
    pub mean: f64,
    pub per_market: Vec<(String, f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KappaSummary {
    pub points: Vec<(f64, f64)>,
    pub fit: ScalingFit,
    pub kappa: f64,
    pub kappa_se: f64,
    pub dimension: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub provenance: Provenance,
    pub settings: AnalyzeConfig,
    pub markets: Vec<MarketSummary>,
    pub horizons_requested: Vec<u32>,
    pub horizons: Vec<u32>,
    pub dropped: Vec<Dropped>,
    pub per_scale: Vec<ScaleResult>,
    /// Across markets and horizons.
    pub pooled: Option<FitSummary>,
    /// On the mean trend over all horizons.
    pub aggregated: Option<FitSummary>,
    pub parabolic: Option<ParabolicFit>,
    pub kappa: Option<KappaSummary>,
    pub hurst: Vec<HurstSummary>,
    /// `(k, T, variance)` of flat-window trends up to the longest horizon
    /// the data allows.
    pub tilde_variance: Vec<(u32, f64, f64)>,
    /// Per horizon `T`, `M_q(T)` averaged over markets, in `qs` order.
    pub moments: Vec<(usize, Vec<f64>)>,
}

fn trends_for(markets: &[Market], k: u32, settings: &AnalyzeConfig) -> Result<Vec<Option<TrendSeries>>, CliError> {
    let horizon = 2f64.powi(k as i32);
    let warmup = WeightFunction::new(settings.estimator, horizon)?.warmup();
    markets
        .iter()
        .map(|m| {
            if m.returns.len() < warmup + 2 {
                return Ok(None);
            }
            Ok(Some(trend_strength_recursive(&m.returns, horizon, settings.estimator)?))
        })
        .collect()
}

fn regression_data(markets: &[Market], trends: &[Option<TrendSeries>]) -> Result<RegressionData, CliError> {
    let mut data = RegressionData::default();
    for (m, t) in markets.iter().zip(trends) {
        if let Some(t) = t {
            data.push_market(t, &m.returns, Some(&m.days))?;
        }
    }
    Ok(data)
}

fn append(into: &mut RegressionData, from: &RegressionData) {
    let offset = into.premiums.len();
    into.premiums.extend_from_slice(&from.premiums);
    into.observations.extend(from.observations.iter().map(|o| Observation { market: o.market + offset, ..*o }));
}

/// Regression sample on the mean of the trends of all horizons.
fn mean_trend_data(markets: &[Market], trends: &[Vec<Option<TrendSeries>>]) -> RegressionData {
    let mut data = RegressionData::default();
    for (i, m) in markets.iter().enumerate() {
        let Some(set) = trends.iter().map(|t| t[i].as_ref()).collect::<Option<Vec<_>>>() else {
            continue;
        };
        let start = set.iter().map(|t| t.warmup()).max().unwrap_or(0);
        let n = m.returns.len();
        if start + 1 >= n {
            continue;
        }
        let market = data.premiums.len();
        data.premiums.push(m.returns.premium());
        let h = set.len() as f64;
        for t in start..n - 1 {
            data.observations.push(Observation {
                day: m.days[t],
                market,
                trend: set.iter().map(|s| s.values[t]).sum::<f64>() / h,
                next_return: m.returns.values[t + 1],
                cum_weight: set.iter().map(|s| s.weights.cumulative_weight(t)).sum::<f64>() / h,
            });
        }
    }
    data
}

fn trend_return(data: &RegressionData) -> Option<MeanEstimate> {
    MeanEstimate::of(data.observations.iter().map(|o| o.trend * (o.next_return - data.premiums[o.market])))
}

fn adjacent(markets: &[Market], horizon: usize) -> Option<MeanEstimate> {
    let pairs: Vec<(f64, f64)> = markets
        .iter()
        .filter_map(|m| adjacent_window_trends(&m.returns, horizon).ok())
        .flatten()
        .collect();
    MeanEstimate::of(pairs.iter().map(|(a, b)| a * b))
}

fn excess_levels(markets: &[Market]) -> Vec<Vec<f64>> {
    markets
        .iter()
        .map(|m| {
            let mut acc = 0.0;
            std::iter::once(0.0)
                .chain(m.returns.excess().into_iter().map(|r| {
                    acc += r;
                    acc
                }))
                .collect()
        })
        .collect()
}

fn hurst(markets: &[Market], settings: &AnalyzeConfig) -> (Vec<HurstSummary>, Vec<(usize, Vec<f64>)>) {
    let mut per_q: Vec<Vec<(String, f64, f64)>> = vec![Vec::new(); settings.qs.len()];
    let mut sums: BTreeMap<usize, (Vec<f64>, usize)> = BTreeMap::new();
    for m in markets {
        let limit = settings.max_moment_horizon.min(m.returns.len() / 10);
        let horizons: Vec<usize> = (0..).map(|j| 1usize << j).take_while(|t| *t <= limit).collect();
        let fits = match moment_scaling(&m.returns.excess(), SeriesKind::Increments, &settings.qs, &horizons) {
            Ok(f) => f,
            Err(e) => {
                log::warn!("no moment scaling for `{}`: {e}", m.name);
                continue;
            }
        };
        for (j, fit) in fits.iter().enumerate() {
            per_q[j].push((m.name.clone(), fit.exponent, fit.exponent_se));
            for &(t, value) in &fit.points {
                let e = sums.entry(t as usize).or_insert_with(|| (vec![0.0; settings.qs.len()], 0));
                e.0[j] += value;
            }
        }
        for t in horizons {
            sums.get_mut(&t).expect("horizon recorded").1 += 1;
        }
    }
    let summaries = settings
        .qs
        .iter()
        .zip(per_q)
        .filter(|(_, v)| !v.is_empty())
        .map(|(&q, per_market)| HurstSummary {
            q,
            mean: per_market.iter().map(|p| p.1).sum::<f64>() / per_market.len() as f64,
            per_market,
        })
        .collect();
    let moments = sums.into_iter().map(|(t, (s, n))| (t, s.into_iter().map(|v| v / n as f64).collect())).collect();
    (summaries, moments)
}

pub fn analyze(config: &Config) -> Result<Report, CliError> {
    let settings = &config.analyze;
    if settings.horizons.is_empty() {
        return Err(CliError::Validation("analyze.horizons is empty".into()));
    }
    if let Some(k) = settings.horizons.iter().find(|k| **k > 30) {
        return Err(CliError::Validation(format!("horizon k = {k} is too large")));
    }
    let (markets, inputs) = load_markets(settings)?;
    log::info!("{} markets loaded", markets.len());
    let provenance = Provenance::new("analyze", config.seed, settings, inputs);
    let needed = MIN_OBSERVATIONS.max(settings.folds * MIN_FOLD_SIZE);

    let mut horizons = settings.horizons.clone();
    horizons.sort_unstable();
    horizons.dedup();
    let built: Vec<(u32, Vec<Option<TrendSeries>>, RegressionData)> = horizons
        .par_iter()
        .map(|&k| {
            let trends = trends_for(&markets, k, settings)?;
            let data = regression_data(&markets, &trends)?;
            Ok((k, trends, data))
        })
        .collect::<Result<_, CliError>>()?;
    let mut dropped = Vec::new();
    let mut kept = Vec::new();
    for (k, trends, data) in built {
        if data.len() < needed {
            let reason = format!("{} observations, need {needed}", data.len());
            log::warn!("dropping k = {k}: insufficient history ({reason})");
            dropped.push(Dropped { k, reason });
        } else {
            kept.push((k, trends, data));
        }
    }

    let paths = excess_levels(&markets);
    let longest = markets.iter().map(|m| m.returns.len()).max().unwrap_or(0);
    let long_scales: Vec<u32> = (0..31).take_while(|k| (2usize << k) <= longest).collect();
    let long_variance = tilde_variance(&paths, &long_scales)?;
    let tilde_at = |k: u32| long_variance.iter().find(|p| p.0 == k as f64).map(|p| p.1);

    let per_scale: Vec<ScaleResult> = kept
        .par_iter()
        .map(|(k, _, data)| {
            let fit = fit_all(data, settings, derive_seed(config.seed, *k as u64))?;
            let horizon = 2f64.powi(*k as i32);
            Ok(ScaleResult {
                k: *k,
                horizon,
                fit,
                trend_return: trend_return(data),
                trend_variance: data.observations.iter().map(|o| o.trend * o.trend).sum::<f64>() / data.len() as f64,
                adjacent_window: adjacent(&markets, 1usize << k),
                tilde_variance: tilde_at(*k),
            })
        })
        .collect::<Result<_, CliError>>()?;

    let (pooled, aggregated) = if kept.is_empty() {
        (None, None)
    } else {
        let mut stacked = RegressionData::default();
        for (_, _, d) in &kept {
            append(&mut stacked, d);
        }
        let trends: Vec<Vec<Option<TrendSeries>>> = kept.iter().map(|(_, t, _)| t.clone()).collect();
        let mean = mean_trend_data(&markets, &trends);
        let pooled = fit_all(&stacked, settings, derive_seed(config.seed, POOLED_STREAM))?;
        let aggregated = if mean.len() >= needed {
            Some(fit_all(&mean, settings, derive_seed(config.seed, AGGREGATED_STREAM))?)
        } else {
            log::warn!("too little common history for the mean trend over all horizons");
            None
        };
        (Some(pooled), aggregated)
    };

    let b: Vec<(f64, f64)> = per_scale.iter().map(|s| (s.k as f64, s.fit.report.b.value)).collect();
    let c: Vec<(f64, f64)> = per_scale.iter().map(|s| (s.k as f64, s.fit.report.c.value)).collect();
    let parabolic = match fit_parabolic_b(&b, &c) {
        Ok(p) => Some(p),
        Err(e) => {
            log::warn!("no parabolic fit of b(k): {e}");
            None
        }
    };

    let points: Vec<(f64, f64)> = settings.kappa_scales().iter().filter_map(|&k| tilde_at(k).map(|v| (k as f64, v))).collect();
    let kappa = match fit_kappa(&points) {
        Ok(fit) => {
            let dimension = match dimension_for_kappa(fit.exponent) {
                Ok(d) => Some(d),
                Err(e) => {
                    log::warn!("no dimension for the fitted kappa: {e}");
                    None
                }
            };
            Some(KappaSummary { kappa: fit.exponent, kappa_se: fit.exponent_se, points, fit, dimension })
        }
        Err(e) => {
            log::warn!("no kappa fit: {e}");
            None
        }
    };

    let (hurst, moments) = hurst(&markets, settings);

    Ok(Report {
        provenance,
        settings: settings.clone(),
        markets: markets
            .iter()
            .map(|m| MarketSummary {
                name: m.name.clone(),
                first: m.first.clone(),
                last: m.last.clone(),
                n_prices: m.n_prices,
                gaps: m.gaps.clone(),
                mu: m.returns.mu,
                sigma: m.returns.sigma,
            })
            .collect(),
        horizons_requested: settings.horizons.clone(),
        horizons: kept.iter().map(|k| k.0).collect(),
        dropped,
        per_scale,
        pooled,
        aggregated,
        parabolic,
        kappa,
        hurst,
        tilde_variance: long_variance.iter().map(|&(k, v)| (k as u32, 2f64.powi(k as i32), v)).collect(),
        moments,
    })
}

fn percent(x: f64) -> f64 {
    100.0 * x
}

pub fn write(report: &Report, config: &Config) -> Result<Vec<PathBuf>, CliError> {
    let p = &report.provenance;
    let mut out = OutDir::create(&config.out)?;
    out.json("report.json", report)?;

    let parabola = |k: u32| report.parabolic.as_ref().map(|f| f.eval(k as f64));
    out.csv(
        "fig1d.csv",
        p,
        &["b, c: per-horizon regression coefficients with bootstrap errors; g = -6c".into()],
        &["k", "T", "b", "b_se", "c", "c_se", "g", "g_se", "b_parabola"],
        report.per_scale.iter().map(|s| {
            let r = &s.fit.report;
            vec![
                s.k.to_string(),
                fmt_f64(s.horizon),
                fmt_f64(r.b.value),
                fmt_f64(r.b.std_error),
                fmt_f64(r.c.value),
                fmt_f64(r.c.std_error),
                fmt_f64(r.g()),
                fmt_f64(6.0 * r.c.std_error),
                fmt_opt(parabola(s.k)),
            ]
        }),
    )?;

    out.csv(
        "fig6.csv",
        p,
        &[],
        &[
            "k",
            "T",
            "trend_return",
            "trend_return_se",
            "trend_variance",
            "tilde_variance",
            "adjacent_window",
            "adjacent_window_se",
            "adjacent_pairs",
        ],
        report.per_scale.iter().map(|s| {
            vec![
                s.k.to_string(),
                fmt_f64(s.horizon),
                fmt_opt(s.trend_return.map(|e| e.mean)),
                fmt_opt(s.trend_return.map(|e| e.std_error)),
                fmt_f64(s.trend_variance),
                fmt_opt(s.tilde_variance),
                fmt_opt(s.adjacent_window.map(|e| e.mean)),
                fmt_opt(s.adjacent_window.map(|e| e.std_error)),
                s.adjacent_window.map_or(String::new(), |e| e.n.to_string()),
            ]
        }),
    )?;

    let moment_names: Vec<String> = config.analyze.qs.iter().map(|q| format!("M_{}", fmt_f64(*q))).collect();
    let mut columns = vec!["k", "T", "tilde_variance"];
    columns.extend(moment_names.iter().map(String::as_str));
    out.csv(
        "fig8.csv",
        p,
        &["M_q: mean over markets of <|pi(t+T) - pi(t)|^q> on normalized excess log-prices".into()],
        &columns,
        report.tilde_variance.iter().map(|&(k, t, v)| {
            let mut row = vec![k.to_string(), fmt_f64(t), fmt_f64(v)];
            let m = report.moments.iter().find(|m| m.0 == 1usize << k);
            row.extend((0..moment_names.len()).map(|j| fmt_opt(m.map(|m| m.1[j]))));
            row
        }),
    )?;

    let mut rows = Vec::new();
    if let Some(f) = &report.pooled {
        let r = &f.report;
        for (name, c) in [("a", r.a), ("b", r.b), ("c", r.c)] {
            rows.push(vec![name.into(), fmt_f64(percent(c.value)), fmt_f64(percent(c.std_error)), fmt_f64(c.t_stat)]);
        }
        rows.push(vec!["R2 single time scales".into(), fmt_f64(basis_points(r.r_squared)), String::new(), String::new()]);
        rows.push(vec!["R2_adj single time scales".into(), fmt_f64(basis_points(r.r_squared_adj)), String::new(), String::new()]);
    }
    if let Some(f) = &report.aggregated {
        let r = &f.report;
        rows.push(vec!["R2 aggregated across time scales".into(), fmt_f64(basis_points(r.r_squared)), String::new(), String::new()]);
        rows.push(vec![
            "R2_adj aggregated across time scales".into(),
            fmt_f64(basis_points(r.r_squared_adj)),
            String::new(),
            String::new(),
        ]);
    }
    out.csv(
        "table2.csv",
        p,
        &["a, b, c in percent with bootstrap errors; R-squared in basis points, adjusted by cross-validation".into()],
        &["Coefficient", "Value", "Error", "t-statistics"],
        rows,
    )?;
    Ok(out.written().to_vec())
}

pub fn run(config: &Config) -> Result<Vec<PathBuf>, CliError> {
    let report = analyze(config)?;
    write(&report, config)
}
