//! `κ` from trend variances across horizons, and the implied network
//! dimension.

use std::path::{Path, PathBuf};

use latgas::stats::{fit_kappa, ScalingFit};
use latgas::theory::{dimension_for_kappa, kappa_for_dimension, MIN_DIMENSION};
use serde::Serialize;

use crate::config::{Config, FitKappaConfig};
use crate::data::sha256_hex;
use crate::output::{InputRecord, OutDir, Provenance};
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct KappaReport {
    pub provenance: Provenance,
    pub kappa: f64,
    /// Residual-based standard error of the fitted slope.
    pub kappa_se: Option<f64>,
    pub dimension: Option<f64>,
    /// Dimensions at `κ ∓ SE`, clipped to the table's range.
    pub dimension_range: Option<(f64, f64)>,
    pub fit: Option<ScalingFit>,
}

/// `(k, variance)` rows from a CSV with a `k` or `T` column.
pub fn read_variances(path: &Path, column: &str) -> Result<(Vec<(f64, f64)>, String), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
    let hash = sha256_hex(&bytes);
    let invalid = |line: u64, msg: String| CliError::Validation(format!("{}:{line}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(bytes.as_slice());
    let header = reader.headers().map_err(|e| invalid(1, e.to_string()))?.clone();
    let find = |name: &str| header.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (scale_col, is_k) = match (find("k"), find("T")) {
        (Some(c), _) => (c, true),
        (None, Some(c)) => (c, false),
        (None, None) => return Err(CliError::Validation(format!("{}: needs a `k` or `T` column", path.display()))),
    };
    let var_col =
        find(column).ok_or_else(|| CliError::Validation(format!("{}: no `{column}` column", path.display())))?;
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| invalid(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let cell = |c: usize| rec.get(c).unwrap_or("");
        if cell(var_col).is_empty() {
            continue;
        }
        let parse = |c: usize| cell(c).parse::<f64>().map_err(|_| invalid(line, format!("invalid number `{}`", cell(c))));
        let scale = parse(scale_col)?;
        let k = if is_k { scale } else { scale.log2() };
        rows.push((k, parse(var_col)?));
    }
    Ok((rows, hash))
}

fn dimension_range(kappa: f64, se: f64) -> Option<(f64, f64)> {
    let min = kappa_for_dimension(MIN_DIMENSION).ok()?;
    let lo = (kappa - se).clamp(min, 1.0);
    let hi = (kappa + se).clamp(min, 1.0);
    Some((dimension_for_kappa(lo).ok()?, dimension_for_kappa(hi).ok()?))
}

pub fn report(config: &Config) -> Result<KappaReport, CliError> {
    let settings: &FitKappaConfig = &config.fit_kappa;
    if let Some(kappa) = settings.kappa {
        let provenance = Provenance::new("fit-kappa", config.seed, settings, vec![]);
        let dimension = dimension_for_kappa(kappa)?;
        return Ok(KappaReport { provenance, kappa, kappa_se: None, dimension: Some(dimension), dimension_range: None, fit: None });
    }
    let path = settings
        .input
        .as_ref()
        .ok_or_else(|| CliError::Validation("fit-kappa needs a variance CSV or --kappa".into()))?;
    let (mut rows, sha256) = read_variances(path, &settings.column)?;
    if let Some(scales) = &settings.scales {
        rows.retain(|(k, _)| scales.iter().any(|s| (*s as f64 - k).abs() < 1e-9));
    }
    let fit = fit_kappa(&rows)?;
    let provenance = Provenance::new(
        "fit-kappa",
        config.seed,
        settings,
        vec![InputRecord { path: path.display().to_string(), sha256 }],
    );
    let dimension = match dimension_for_kappa(fit.exponent) {
        Ok(d) => Some(d),
        Err(e) => {
            log::warn!("no dimension for the fitted kappa: {e}");
            None
        }
    };
    Ok(KappaReport {
        provenance,
        kappa: fit.exponent,
        kappa_se: Some(fit.exponent_se),
        dimension,
        dimension_range: dimension.and_then(|_| dimension_range(fit.exponent, fit.exponent_se)),
        fit: Some(fit),
    })
}

pub fn run(config: &Config) -> Result<(Vec<PathBuf>, KappaReport), CliError> {
    let report = report(config)?;
    log::info!(
        "kappa = {} (se {:?}), D = {:?}",
        report.kappa,
        report.kappa_se,
        report.dimension
    );
    let mut out = OutDir::create(&config.out)?;
    out.json("kappa.json", &report)?;
    Ok((out.written().to_vec(), report))
}
