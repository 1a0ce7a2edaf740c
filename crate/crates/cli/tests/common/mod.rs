#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chrono::NaiveDate;
use latgas::rng::stream_rng;
use latgas::trend::WeightFunction;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn latgas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latgas")).args(args).env("RUST_LOG", "warn").output().expect("binary runs")
}

pub fn dates(n: usize) -> Vec<NaiveDate> {
    let start = NaiveDate::from_ymd_opt(1990, 1, 1).unwrap();
    (0..n as u64).map(|i| start + chrono::Days::new(i)).collect()
}

/// Wide CSV; `None` leaves the cell empty.
pub fn write_wide(path: &Path, names: &[String], columns: &[Vec<Option<f64>>]) {
    let n = columns.iter().map(Vec::len).max().unwrap();
    let mut text = format!("date,{}\n", names.join(","));
    for (i, d) in dates(n).iter().enumerate() {
        text.push_str(&d.to_string());
        for c in columns {
            text.push(',');
            if let Some(Some(p)) = c.get(i) {
                text.push_str(&p.to_string());
            }
        }
        text.push('\n');
    }
    std::fs::write(path, text).unwrap();
}

pub fn prices_from_returns(returns: &[f64]) -> Vec<Option<f64>> {
    let mut p = 100.0;
    std::iter::once(Some(p))
        .chain(returns.iter().map(|r| {
            p *= r.exp();
            Some(p)
        }))
        .collect()
}

pub fn noise(n: usize, seed: u64, scale: f64) -> Vec<f64> {
    let mut rng = stream_rng(seed, 0);
    (0..n).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Returns following `r(t+1) = a + b·φ(t) + c·φ(t)³ + ε` with `φ` the trend
/// of horizon `T` on past excess returns `r − a`, scaled by `scale`.
pub fn cubic_returns(n: usize, horizon: f64, coef: [f64; 3], seed: u64, scale: f64) -> Vec<f64> {
    let w = WeightFunction::phi(horizon).unwrap();
    let w = w.weights();
    let eps = noise(n, seed, 1.0);
    let mut r = Vec::with_capacity(n);
    r.push(coef[0] + eps[0]);
    for t in 1..n {
        let lags = (t - 1).min(w.len() - 1);
        let phi: f64 = (0..=lags).map(|j| w[j] * (r[t - 1 - j] - coef[0])).sum();
        r.push(coef[0] + coef[1] * phi + coef[2] * phi.powi(3) + eps[t]);
    }
    r.into_iter().map(|x| scale * x).collect()
}

pub fn market_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("M{i:02}")).collect()
}

pub fn read_data_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

pub fn header_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path).unwrap().lines().take_while(|l| l.starts_with('#')).map(str::to_string).collect()
}

pub fn out_dir(root: &Path, name: &str) -> PathBuf {
    root.join(name)
}
