//! Glauber simulation of the lattice and its price and return series.

use std::path::PathBuf;

use latgas::dynamics::{binder_cumulant, magnetization_to_returns, run_simulation, SimulationParams};
use serde::Serialize;

use crate::config::Config;
use crate::output::{fmt_f64, OutDir, Provenance};
use crate::CliError;

#[derive(Serialize)]
struct Summary<'a> {
    provenance: &'a Provenance,
    params: &'a SimulationParams,
    n_sites: usize,
    recorded: usize,
    mean_abs_magnetization_per_site: f64,
    /// Absent when fewer than 100 values were recorded.
    binder_cumulant: Option<f64>,
    return_mean: f64,
    return_std: f64,
}

pub fn params(config: &Config) -> Result<SimulationParams, CliError> {
    let s = &config.simulate;
    let params = SimulationParams {
        dims: s.dims,
        side: s.side,
        init: s.init(config.seed),
        temperature: s.temperature()?,
        sweeps: s.sweeps()?,
        burn_in: s.burn_in()?,
        thin: s.thin,
        seed: config.seed,
    };
    params.validate()?;
    Ok(params)
}

pub fn run(config: &Config) -> Result<Vec<PathBuf>, CliError> {
    let params = params(config)?;
    log::info!(
        "simulating D={} L={} T={} for {} sweeps ({} burn-in)",
        params.dims,
        params.side,
        params.temperature,
        params.sweeps,
        params.burn_in
    );
    let series = run_simulation(&params)?;
    if series.len() < 2 {
        return Err(CliError::Validation(format!(
            "only {} magnetization values recorded; need at least 2 for returns",
            series.len()
        )));
    }
    let returns = magnetization_to_returns(&series)?;
    let provenance = Provenance::new("simulate", config.seed, &params, vec![]);
    let mut out = OutDir::create(&config.out)?;

    let prices = series.prices();
    out.csv(
        "magnetization.csv",
        &provenance,
        &["price = 1 + 2M/N".into()],
        &["sweep", "M", "price"],
        series.sweeps.iter().zip(&series.values).zip(&prices).map(|((s, m), p)| {
            vec![s.to_string(), fmt_f64(*m), fmt_f64(*p)]
        }),
    )?;
    out.csv(
        "returns.csv",
        &provenance,
        &[
            "return = (M(t) - M(t-1)) / sigma".into(),
            format!("mean_dM: {}", fmt_f64(returns.mu)),
            format!("sigma_dM: {}", fmt_f64(returns.sigma)),
        ],
        &["sweep", "return"],
        series.sweeps[1..].iter().zip(&returns.values).map(|(s, r)| vec![s.to_string(), fmt_f64(*r)]),
    )?;
    let abs = series.abs_per_site();
    out.json(
        "params.json",
        &Summary {
            provenance: &provenance,
            params: &params,
            n_sites: series.n_sites,
            recorded: series.len(),
            mean_abs_magnetization_per_site: abs.iter().sum::<f64>() / abs.len() as f64,
            binder_cumulant: binder_cumulant(&series.values).ok(),
            return_mean: returns.mu,
            return_std: returns.sigma,
        },
    )?;
    Ok(out.written().to_vec())
}
