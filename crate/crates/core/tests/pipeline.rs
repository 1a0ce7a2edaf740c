//! Simulation through regression, on the lattice itself.

use latgas::dynamics::{critical_temperature_2d, magnetization_to_returns, run_simulation, SimulationParams};
use latgas::stats::{bootstrap_errors, fit_cubic_data, RegressionData, Resampling};
use latgas::trend::{trend_strength, trend_strength_recursive, WeightFunction, WeightKind};
use latgas::Init;

fn critical_run(seed: u64) -> latgas::MagnetizationSeries {
    let params = SimulationParams {
        dims: 2,
        side: 16,
        init: Init::Random(seed),
        temperature: critical_temperature_2d(),
        sweeps: 62_000,
        burn_in: 2_000,
        thin: 1,
        seed,
    };
    run_simulation(&params).unwrap()
}

#[test]
fn lattice_returns_revert_and_trends_predict_reversal() {
    let series = critical_run(21);
    let returns = magnetization_to_returns(&series).unwrap();
    let n = returns.len() as f64;
    let var = returns.values.iter().map(|r| (r - returns.premium()).powi(2)).sum::<f64>() / n;
    assert!((var - 1.0).abs() < 1e-12);

    // increments of a stationary magnetization are anti-correlated
    let ex = returns.excess();
    let lag1 = ex.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (n - 1.0);
    assert!(lag1 < -3.0 / n.sqrt(), "lag-1 autocorrelation {lag1}");

    let recursive = trend_strength_recursive(&returns, 8.0, WeightKind::Phi).unwrap();
    let direct = trend_strength(&returns, &WeightFunction::phi(8.0).unwrap());
    for t in recursive.warmup()..returns.len() {
        assert!((recursive.values[t] - direct.values[t]).abs() < 1e-9);
    }

    let mut data = RegressionData::default();
    for h in [2.0, 8.0, 32.0] {
        let trend = trend_strength_recursive(&returns, h, WeightKind::Phi).unwrap();
        data.push_market(&trend, &returns, None).unwrap();
    }
    let fit = fit_cubic_data(&data).unwrap();
    let boot = bootstrap_errors(&data, 300, 4, Resampling::Blocks { length: 50 }).unwrap();
    let fit = fit.with_bootstrap(&boot);
    assert!(fit.b.t_stat < -3.0, "b = {} (t {})", fit.b.value, fit.b.t_stat);
}

#[test]
fn same_seed_same_series() {
    let a = critical_run(5);
    let b = critical_run(5);
    assert_eq!(a.values, b.values);
    assert_ne!(a.values, critical_run(6).values);
}
