//! Theory curves for a propagator model over horizons `T = 2^k`.

use std::path::PathBuf;

use latgas::theory::{
    dimension_for_kappa, exponents_for_dimension, prediction_curve, Curve, PropagatorModel, TheoryError,
    TrendEstimator,
};
use serde::Serialize;

use crate::config::{Config, PredictConfig};
use crate::output::{fmt_f64, OutDir, Provenance};
use crate::CliError;

pub const CURVES: [Curve; 5] = [
    Curve::ReturnAutocorrelation,
    Curve::TrendReturnCorrelation,
    Curve::TrendVariance(TrendEstimator::Phi),
    Curve::TrendVariance(TrendEstimator::Tilde),
    Curve::AdjacentWindowCorrelation,
];

/// Local Hurst exponent `d ln M₂/d ln T / 2` with `M₂(T) ∝ Δ(0) − Δ(T)`;
/// `κ/2` throughout the scaling regime.
pub fn local_hurst(model: &PropagatorModel, horizon: f64) -> Result<f64, TheoryError> {
    let (first, _) = model.derivatives(horizon)?;
    let rise = model.value(0.0)? - model.value(horizon)?;
    Ok(-horizon * first / (2.0 * rise))
}

#[derive(Serialize)]
struct CurveEntry {
    name: String,
    file: String,
    points: usize,
    skipped_scales: Vec<u32>,
}

#[derive(Serialize)]
struct Summary<'a> {
    provenance: &'a Provenance,
    settings: &'a PredictConfig,
    model: PropagatorModel,
    kappa: f64,
    /// κ as tabulated, three decimals.
    kappa_rounded: String,
    /// Given, or inferred from κ when it lies in the table's range.
    dimension: Option<f64>,
    dimension_inferred: bool,
    eta: Option<f64>,
    z: Option<f64>,
    /// `κ/2` of the scaling regime.
    hurst: f64,
    heuristic_regime: bool,
    curves: Vec<CurveEntry>,
}

pub fn model(settings: &PredictConfig) -> Result<(PropagatorModel, Option<f64>), CliError> {
    let (kappa, dimension) = settings.kappa()?;
    Ok((PropagatorModel::new(settings.tau, kappa, settings.regime())?, dimension))
}

pub fn run(config: &Config) -> Result<Vec<PathBuf>, CliError> {
    let settings = &config.predict;
    if settings.scales.is_empty() {
        return Err(CliError::Validation("predict.scales is empty".into()));
    }
    let (model, given_dimension) = model(settings)?;
    let dimension = given_dimension.or_else(|| dimension_for_kappa(model.kappa).ok());
    let exponents = dimension.and_then(|d| exponents_for_dimension(d).ok());
    let heuristic = model.regime.is_heuristic();
    if heuristic {
        log::warn!("the matched regime is a heuristic interpolation between the two regimes");
    }
    let provenance = Provenance::new("predict", config.seed, settings, vec![]);
    let kappa_rounded = format!("{:.3}", model.kappa);
    let mut header = vec![
        format!("kappa: {}", fmt_f64(model.kappa)),
        format!("kappa_rounded: {kappa_rounded}"),
        format!("tau: {}", fmt_f64(model.tau)),
        format!("regime: {}", serde_json::to_string(&model.regime).expect("regime serializes")),
    ];
    match (given_dimension, dimension) {
        (Some(d), _) => header.push(format!("dimension: {}", fmt_f64(d))),
        (None, Some(d)) => header.push(format!("dimension_inferred: {}", fmt_f64(d))),
        (None, None) => {}
    }
    if heuristic {
        header.push("warning: heuristic regime".into());
    }

    let mut out = OutDir::create(&config.out)?;
    let mut entries = Vec::new();
    let mut emit = |name: String, points: Vec<(u32, f64, f64)>, out: &mut OutDir| -> Result<(), CliError> {
        let file = format!("{name}.csv");
        let skipped = settings.scales.iter().copied().filter(|k| !points.iter().any(|p| p.0 == *k)).collect();
        out.csv(
            &file,
            &provenance,
            &header,
            &["k", "T", "prediction"],
            points.iter().map(|(k, t, v)| vec![k.to_string(), fmt_f64(*t), fmt_f64(*v)]),
        )?;
        entries.push(CurveEntry { name, file, points: points.len(), skipped_scales: skipped });
        Ok(())
    };
    for curve in CURVES {
        let points = prediction_curve(&model, curve, settings.scales.iter().copied())?;
        let with_k = points.into_iter().map(|(t, v)| (t.log2().round() as u32, t, v)).collect();
        emit(curve.name(), with_k, &mut out)?;
    }
    let mut hurst = Vec::new();
    for &k in &settings.scales {
        let t = 2f64.powi(k as i32);
        match local_hurst(&model, t) {
            Ok(h) => hurst.push((k, t, h)),
            Err(TheoryError::Domain(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    emit("hurst".into(), hurst, &mut out)?;

    out.json(
        "summary.json",
        &Summary {
            provenance: &provenance,
            settings,
            model,
            kappa: model.kappa,
            kappa_rounded,
            dimension,
            dimension_inferred: given_dimension.is_none() && dimension.is_some(),
            eta: exponents.as_ref().map(|e| e.eta),
            z: exponents.as_ref().map(|e| e.z),
            hurst: model.kappa / 2.0,
            heuristic_regime: heuristic,
            curves: entries,
        },
    )?;
    Ok(out.written().to_vec())
}
