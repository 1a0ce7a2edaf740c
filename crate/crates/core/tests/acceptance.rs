//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::time::Instant;

use latgas::dynamics::{
    binder_cumulant_with_error, critical_temperature_2d, default_burn_in, run_simulation, SimulationParams,
};
use latgas::rng::derive_seed;
use latgas::stats::{
    bootstrap_errors, fit_cubic_data, fit_kappa, gaussian_process_from_propagator, moment_scaling, tilde_variance,
    Observation, RegressionData, Resampling, SeriesKind,
};
use latgas::theory::{
    dimension_for_kappa, kappa_for_dimension, predicted_hurst, predicted_return_autocorrelation,
    predicted_trend_return_correlation, predicted_trend_variance, table1_exponents, PropagatorModel, Regime,
    TrendEstimator,
};
use latgas::trend::{trend_strength, trend_strength_recursive, ReturnSeries, WeightFunction, WeightKind};
use latgas::Init;

use common::{gamma, relative_error};

type Outcome = Result<String, String>;

fn check(pass: bool, detail: String) -> Outcome {
    if pass {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// 1. Table rows and κ = (2 − η)/z.
fn table_fidelity() -> Outcome {
    const PUBLISHED: [(f64, f64, f64, f64); 6] = [
        (4.0, 0.00, 2.000, 1.000),
        (3.5, 0.002, 2.001, 0.998),
        (3.0, 0.036, 2.024, 0.970),
        (2.5, 0.106, 2.071, 0.915),
        (2.0, 0.250, 2.167, 0.808),
        (1.5, 0.523, 2.352, 0.628),
    ];
    let rows = table1_exponents();
    let mut mismatches = Vec::new();
    let mut worst_identity: f64 = 0.0;
    for (row, &(d, eta, z, kappa)) in rows.iter().zip(PUBLISHED.iter()) {
        if row.dimension != d || row.eta != eta || row.z != z || row.table_kappa != Some(kappa) {
            mismatches.push(format!("D={d}"));
        }
        worst_identity = worst_identity.max((row.kappa - (2.0 - row.eta) / row.z).abs());
    }
    let pass = rows.len() == 6 && mismatches.is_empty() && worst_identity <= 1e-9;
    check(pass, format!("18/18 table entries exact: {}, max |κ − (2−η)/z| = {worst_identity:.1e}", mismatches.is_empty()))
}

// 2. κ → D inversion.
fn dimension_inference() -> Outcome {
    let d = dimension_for_kappa(0.96).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for i in 0..=250 {
        let dim = 1.5 + 0.01 * i as f64;
        let k = kappa_for_dimension(dim).map_err(|e| e.to_string())?;
        let back = dimension_for_kappa(k).map_err(|e| e.to_string())?;
        let k_back = kappa_for_dimension(back).map_err(|e| e.to_string())?;
        worst = worst.max((k_back - k).abs());
    }
    check(
        (d - 2.9).abs() <= 0.1 && worst <= 1e-6,
        format!("κ=0.96 → D={d:.4} (want 2.9 ± 0.1); max κ round-trip error over D∈[1.5,4] = {worst:.1e}"),
    )
}

// 3. Quadrature against Γ-function and Laplace closed forms.
fn closed_form_vs_quadrature() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut where_worst = String::new();
    let mut record = |got: f64, want: f64, label: String| {
        let e = relative_error(got, want);
        count += 1;
        if e > worst {
            worst = e;
            where_worst = label;
        }
    };
    for kappa in [0.6, 0.9, 0.97, 1.0] {
        for tau in [64.0, 2048.0] {
            for k in 1..=10 {
                let t = 2f64.powi(k);
                let omega = 2.0 / t;
                let exp = PropagatorModel::exponential(tau, kappa).map_err(|e| e.to_string())?;
                let phi = predicted_trend_variance(&exp, t, TrendEstimator::Phi).map_err(|e| e.to_string())?;
                record(phi, omega * omega / (omega + 1.0 / tau).powi(2) * tau.powf(kappa - 1.0), format!("exp phi κ={kappa} τ={tau} T={t}"));
                let corr = predicted_trend_return_correlation(&exp, omega).map_err(|e| e.to_string())?;
                record(corr, -omega.powf(1.5) * tau.powf(kappa - 2.0) / (omega + 1.0 / tau).powi(2), format!("exp corr κ={kappa} τ={tau} T={t}"));
                if t <= tau / 4.0 {
                    let sc = PropagatorModel::scaling(tau, kappa).map_err(|e| e.to_string())?;
                    let phi = predicted_trend_variance(&sc, t, TrendEstimator::Phi).map_err(|e| e.to_string())?;
                    record(phi, kappa * gamma(kappa + 1.0) * omega.powf(1.0 - kappa), format!("scaling phi κ={kappa} τ={tau} T={t}"));
                    let corr = predicted_trend_return_correlation(&sc, omega).map_err(|e| e.to_string())?;
                    let want = -omega.powf(1.5) * kappa * (1.0 - kappa) * gamma(kappa) * omega.powf(-kappa);
                    record(corr, want, format!("scaling corr κ={kappa} τ={tau} T={t}"));
                    let tilde = predicted_trend_variance(&sc, t, TrendEstimator::Tilde).map_err(|e| e.to_string())?;
                    record(tilde, t.powf(kappa - 1.0), format!("scaling tilde κ={kappa} τ={tau} T={t}"));
                }
            }
        }
    }
    check(worst <= 1e-6, format!("{count} comparisons, max relative error {worst:.2e} ({where_worst})"))
}

// 4. Phase transition and Binder crossing on the square lattice.
fn phase_transition() -> Outcome {
    let tc = critical_temperature_2d();
    let run = |side: usize, temperature: f64, sweeps: u64, burn_in: u64, seed: u64| {
        run_simulation(&SimulationParams {
            dims: 2,
            side,
            init: Init::Random(seed),
            temperature,
            sweeps,
            burn_in,
            thin: 1,
            seed,
        })
        .map_err(|e| e.to_string())
    };
    let ordered = run(32, 0.9 * tc, 20_000 + 2_000, 2_000, 41)?;
    let disordered = run(32, 1.5 * tc, 20_000 + 2_000, 2_000, 42)?;
    let m_low = common::mean(&ordered.abs_per_site());
    let m_high = common::mean(&disordered.abs_per_site());
    let mut binder = Vec::new();
    for (side, seed) in [(8usize, 43u64), (16, 44)] {
        let burn = default_burn_in(side, 2.167);
        let s = run(side, tc, 200_000 + burn, burn, seed)?;
        binder.push(binder_cumulant_with_error(&s.values, 20).map_err(|e| e.to_string())?);
    }
    let (u8, e8) = binder[0];
    let (u16, e16) = binder[1];
    let joint = (e8 * e8 + e16 * e16).sqrt();
    check(
        m_low > 0.3 && m_high < 0.1 && (u8 - u16).abs() <= 3.0 * joint,
        format!(
            "⟨|M|/N⟩ = {m_low:.3} at 0.9·Tc (want > 0.3), {m_high:.3} at 1.5·Tc (want < 0.1); Binder U8 = {u8:.4} ± {e8:.4}, U16 = {u16:.4} ± {e16:.4}, |Δ| = {:.2}σ",
            (u8 - u16).abs() / joint
        ),
    )
}

// 5. Weight normalization, recursion and variance of trends on white noise.
fn estimator_consistency() -> Outcome {
    let mut worst_norm: f64 = 0.0;
    for k in 1..=13 {
        let t = 2f64.powi(k);
        for kind in [WeightKind::Step, WeightKind::Psi, WeightKind::Phi] {
            let w = WeightFunction::new(kind, t).map_err(|e| e.to_string())?;
            worst_norm = worst_norm.max((w.sum_of_squares() - 1.0).abs());
        }
    }
    let n = 100_000;
    let returns = ReturnSeries::unnormalized(common::gaussian_noise(n, 5));
    let mut worst_rec: f64 = 0.0;
    for k in [1, 4, 7, 10] {
        let t = 2f64.powi(k);
        for kind in [WeightKind::Step, WeightKind::Psi, WeightKind::Phi] {
            let w = WeightFunction::new(kind, t).map_err(|e| e.to_string())?;
            let direct = trend_strength(&returns, &w);
            let rec = trend_strength_recursive(&returns, t, kind).map_err(|e| e.to_string())?;
            for (a, b) in direct.values.iter().zip(&rec.values) {
                worst_rec = worst_rec.max((a - b).abs());
            }
        }
    }
    // Var(φ) = 1 on white noise; the sampling error of a variance is
    // √(2/n_eff) with n_eff = n / Σ_k ρ(k)² and ρ(k) = Σ_n w(n)w(n+k).
    let mut worst_z: f64 = 0.0;
    let mut detail = Vec::new();
    for k in [1, 4, 7] {
        let t = 2f64.powi(k);
        for kind in [WeightKind::Step, WeightKind::Psi, WeightKind::Phi] {
            let w = WeightFunction::new(kind, t).map_err(|e| e.to_string())?;
            let trend = trend_strength_recursive(&returns, t, kind).map_err(|e| e.to_string())?;
            let v = &trend.values[w.warmup()..];
            let var = v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64;
            let ws = w.weights();
            let rho2: f64 = (0..ws.len())
                .map(|lag| {
                    let r: f64 = ws.iter().zip(&ws[lag..]).map(|(a, b)| a * b).sum();
                    if lag == 0 {
                        r * r
                    } else {
                        2.0 * r * r
                    }
                })
                .sum();
            let n_eff = v.len() as f64 / rho2;
            let z = (var - 1.0) / (2.0 / n_eff).sqrt();
            worst_z = worst_z.max(z.abs());
            detail.push(format!("{kind}{t}:{var:.3}"));
        }
    }
    check(
        worst_norm <= 1e-10 && worst_rec <= 1e-9 && worst_z <= 3.0,
        format!(
            "max |Σw² − 1| = {worst_norm:.1e}; max |recursive − direct| = {worst_rec:.1e}; trend variances {} (max {worst_z:.2} σ)",
            detail.join(" ")
        ),
    )
}

const TABLE2: [f64; 3] = [0.0133, 0.0129, -0.0062];
const MARKETS: usize = 24;
const DAYS: usize = 7_500;

/// 24 markets × 7500 days: trends are φ-weighted (T = 16) sums of white
/// noise, next-day returns follow the cubic law plus unit noise.
fn synthetic_panel(seed: u64, noise: f64) -> RegressionData {
    let mut data = RegressionData::default();
    for m in 0..MARKETS {
        let s = derive_seed(seed, m as u64);
        let r = ReturnSeries::unnormalized(common::gaussian_noise(DAYS, s));
        let trend = trend_strength_recursive(&r, 16.0, WeightKind::Phi).expect("valid horizon");
        let eps = common::gaussian_noise(DAYS, s ^ 0x5eed);
        data.premiums.push(0.0);
        for t in 0..DAYS {
            let x = trend.values[t];
            data.observations.push(Observation {
                day: t,
                market: m,
                trend: x,
                next_return: TABLE2[0] + TABLE2[1] * x + TABLE2[2] * x * x * x + noise * eps[t],
                cum_weight: 0.0,
            });
        }
    }
    data
}

// 6. Recovery of injected regression coefficients.
fn regression_recovery() -> Outcome {
    let data = synthetic_panel(6, 1.0);
    let fit = fit_cubic_data(&data).map_err(|e| e.to_string())?;
    let boot = bootstrap_errors(&data, 5_000, 6, Resampling::Days).map_err(|e| e.to_string())?;
    let z: Vec<f64> = fit.coefficients().iter().zip(TABLE2).zip(boot.std_errors).map(|((g, w), se)| (g - w) / se).collect();
    let recovered = z.iter().all(|z| z.abs() <= 3.0);

    let exact = fit_cubic_data(&synthetic_panel(7, 0.0)).map_err(|e| e.to_string())?;
    let exact_err = exact.coefficients().iter().zip(TABLE2).fold(0.0f64, |m, (g, w)| m.max((g - w).abs()));

    let trials = 200;
    let mut estimates = Vec::with_capacity(trials);
    let mut boot_se = [0.0; 3];
    for i in 0..trials {
        let d = synthetic_panel(1_000 + i as u64, 1.0);
        estimates.push(fit_cubic_data(&d).map_err(|e| e.to_string())?.coefficients());
        let b = bootstrap_errors(&d, 500, i as u64, Resampling::Days).map_err(|e| e.to_string())?;
        for j in 0..3 {
            boot_se[j] += b.std_errors[j] / trials as f64;
        }
    }
    let mc_se: Vec<f64> =
        (0..3).map(|j| common::std_dev(&estimates.iter().map(|e| e[j]).collect::<Vec<_>>())).collect();
    let ratios: Vec<f64> = (0..3).map(|j| boot_se[j] / mc_se[j]).collect();
    let se_ok = ratios.iter().all(|r| (r - 1.0).abs() <= 0.2);
    check(
        recovered && exact_err <= 1e-10 && se_ok,
        format!(
            "n = {}: (a,b,c) = ({:.4}, {:.4}, {:.4}) at z = ({:.2}, {:.2}, {:.2}) bootstrap SE; noiseless max error {exact_err:.1e}; bootstrap/Monte-Carlo SE = ({:.3}, {:.3}, {:.3}) over {trials} datasets",
            data.len(),
            fit.a.value, fit.b.value, fit.c.value, z[0], z[1], z[2], ratios[0], ratios[1], ratios[2]
        ),
    )
}

// 7. Generalized Hurst exponents.
fn hurst_suite() -> Outcome {
    let horizons: Vec<usize> = (0..=9).map(|k| 1 << k).collect();
    let iid = common::gaussian_noise(100_000, 7);
    let fits = moment_scaling(&iid, SeriesKind::Increments, &[1.0, 2.0, 3.0, 4.0], &horizons).map_err(|e| e.to_string())?;
    let iid_h: Vec<f64> = fits.iter().map(|f| f.exponent).collect();
    let iid_ok = iid_h.iter().all(|h| (h - 0.5).abs() <= 0.02);

    let (fgn, _) = common::fractional_gaussian_noise(0.7, 1 << 17, 7);
    let h2 = moment_scaling(&fgn, SeriesKind::Increments, &[2.0], &horizons).map_err(|e| e.to_string())?[0].exponent;
    let fgn_ok = (h2 - 0.7).abs() <= 0.03;

    let predicted: Vec<f64> = [2.0, 3.0, 4.0].iter().map(|&d| predicted_hurst(d).unwrap()).collect();
    let pred_ok = (predicted[0] - 0.40).abs() <= 0.005 && (predicted[1] - 0.485).abs() <= 0.0025 && predicted[2] == 0.5;
    check(
        iid_ok && fgn_ok && pred_ok,
        format!(
            "i.i.d. H_q = ({:.3}, {:.3}, {:.3}, {:.3}); fGn(0.7) H₂ = {h2:.3}; predicted H(D=2,3,4) = ({:.3}, {:.4}, {:.3})",
            iid_h[0], iid_h[1], iid_h[2], iid_h[3], predicted[0], predicted[1], predicted[2]
        ),
    )
}

const LOOP_TAU: f64 = 4096.0;
const LOOP_PATHS: u64 = 8;
const LOOP_PATH_LEN: usize = 4096;
/// Horizons `T = 2^k`. Short horizons carry most of the information: the
/// sampling error of a variance estimate grows like `√T`.
const LOOP_SCALES: [u32; 5] = [0, 1, 2, 3, 4];

fn recover_dimension(d: f64, seed: u64) -> Result<f64, String> {
    let kappa = kappa_for_dimension(d).map_err(|e| e.to_string())?;
    let model = PropagatorModel::scaling(LOOP_TAU, kappa).map_err(|e| e.to_string())?;
    let paths = (0..LOOP_PATHS)
        .map(|i| gaussian_process_from_propagator(&model, LOOP_PATH_LEN, derive_seed(seed, i)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let curve = tilde_variance(&paths, &LOOP_SCALES).map_err(|e| e.to_string())?;
    let fit = fit_kappa(&curve).map_err(|e| e.to_string())?;
    dimension_for_kappa(fit.exponent.min(1.0)).map_err(|e| e.to_string())
}

// 8. Gaussian paths → variance curve → κ̂ → D̂.
fn scaling_loop() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (d, seed) in [(2.0, 8u64), (3.0, 9)] {
        let est = recover_dimension(d, seed)?;
        pass &= (est - d).abs() <= 0.15;
        // how often the same design succeeds over replicate seeds
        let replicates = 50;
        let hits = (0..replicates)
            .filter(|r| recover_dimension(d, 10_000 + r).map(|e| (e - d).abs() <= 0.15).unwrap_or(false))
            .count();
        parts.push(format!("D={d}: D̂ = {est:.3} (replicates within ±0.15: {hits}/{replicates})"));
    }
    check(pass, format!("n = {}; {}", LOOP_PATHS as usize * LOOP_PATH_LEN, parts.join("; ")))
}

// 9. Return autocorrelations are never positive.
fn sign_law() -> Outcome {
    let mut tested = 0;
    let mut positive = 0;
    for kappa in [0.1, 0.3, 0.5, 0.628, 0.808, 0.915, 0.97, 0.998, 0.9999] {
        for tau in [16.0, 256.0, 4096.0, 65536.0] {
            for regime in [Regime::Scaling, Regime::Exponential] {
                let m = PropagatorModel::new(tau, kappa, regime).map_err(|e| e.to_string())?;
                for i in 1..=200 {
                    let t = tau * i as f64 / 200.0;
                    tested += 1;
                    if predicted_return_autocorrelation(&m, t).map_err(|e| e.to_string())? > 0.0 {
                        positive += 1;
                    }
                }
            }
        }
    }
    // one-sided z-test of the lag-1 autocorrelation of path increments
    let mut zs = Vec::new();
    for (d, seed) in [(2.0, 91u64), (3.0, 92)] {
        let kappa = kappa_for_dimension(d).map_err(|e| e.to_string())?;
        let model = PropagatorModel::scaling(LOOP_TAU, kappa).map_err(|e| e.to_string())?;
        let (mut num, mut den, mut n) = (0.0, 0.0, 0usize);
        for i in 0..LOOP_PATHS {
            let p = gaussian_process_from_propagator(&model, LOOP_PATH_LEN, derive_seed(seed, i))
                .map_err(|e| e.to_string())?;
            let r: Vec<f64> = p.windows(2).map(|w| w[1] - w[0]).collect();
            num += r.windows(2).map(|w| w[0] * w[1]).sum::<f64>();
            den += r.iter().map(|x| x * x).sum::<f64>();
            n += r.len() - 1;
        }
        zs.push((d, num / den, num / den * (n as f64).sqrt()));
    }
    let z_crit = -2.326;
    let paths_ok = zs.iter().all(|z| z.2 < z_crit);
    check(
        positive == 0 && paths_ok,
        format!(
            "{positive}/{tested} positive −Δ̈ values; lag-1 increment autocorrelation {} (99% one-sided critical z = {z_crit})",
            zs.iter().map(|(d, r, z)| format!("D={d}: {r:.4} (z = {z:.1})")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("table fidelity", table_fidelity),
        ("dimension inference", dimension_inference),
        ("closed form vs quadrature", closed_form_vs_quadrature),
        ("phase transition", phase_transition),
        ("estimator consistency", estimator_consistency),
        ("regression recovery", regression_recovery),
        ("Hurst suite", hurst_suite),
        ("scaling loop", scaling_loop),
        ("sign law", sign_law),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS [{secs:.1}s] {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{secs:.1}s] {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("acceptance: {failed} criterion/criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all criteria passed");
}
