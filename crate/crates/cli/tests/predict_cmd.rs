mod common;

use latgas_cli::commands::predict;
use latgas_cli::config::{Config, RegimeKind};

fn run(config: &Config) -> std::path::PathBuf {
    predict::run(config).unwrap();
    config.out.clone()
}

fn values(path: &std::path::Path) -> Vec<(u32, f64)> {
    common::read_data_rows(path).iter().map(|r| (r[0].parse().unwrap(), r[2].parse().unwrap())).collect()
}

#[test]
fn kappa_one_has_no_autocorrelation() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = Config::default();
    c.out = dir.path().to_path_buf();
    c.predict.kappa = Some(1.0);
    let out = run(&c);
    let v = values(&out.join("return_autocorrelation.csv"));
    assert_eq!(v.len(), 13);
    assert!(v.iter().all(|p| p.1 == 0.0));
    let raw = std::fs::read_to_string(out.join("return_autocorrelation.csv")).unwrap();
    assert!(raw.lines().filter(|l| !l.starts_with('#')).skip(1).all(|l| l.ends_with(",0")));
}

#[test]
fn dimension_three_records_tabulated_kappa() {
    let dir = tempfile::tempdir().unwrap();
    let o = common::latgas(&["predict", "--dimension", "3", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    for f in ["return_autocorrelation.csv", "trend_variance_phi.csv", "hurst.csv"] {
        let h = common::header_lines(&dir.path().join(f));
        assert!(h.contains(&"# kappa_rounded: 0.970".to_string()), "{h:?}");
        assert!(h.contains(&"# dimension: 3".to_string()), "{h:?}");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["kappa_rounded"], "0.970");
    assert_eq!(summary["heuristic_regime"], false);
    let h = summary["hurst"].as_f64().unwrap();
    assert!((h - 0.485).abs() < 5e-4);
}

#[test]
fn variances_fall_with_horizon_below_kappa_one() {
    let dir = tempfile::tempdir().unwrap();
    for d in [2.0, 2.5, 3.0, 3.5] {
        let mut c = Config::default();
        c.out = dir.path().join(format!("d{d}"));
        c.predict.dimension = Some(d);
        let out = run(&c);
        for f in ["trend_variance_phi.csv", "trend_variance_tilde.csv"] {
            let v = values(&out.join(f));
            assert_eq!(v.len(), 13, "{f}");
            assert!(v.windows(2).all(|w| w[1].1 < w[0].1), "{d} {f} {v:?}");
        }
        // purely negative autocorrelation of returns
        assert!(values(&out.join("return_autocorrelation.csv")).iter().all(|p| p.1 < 0.0));
    }
}

#[test]
fn tilde_variance_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = Config::default();
    c.out = dir.path().to_path_buf();
    c.predict.kappa = Some(0.9);
    let out = run(&c);
    for (k, v) in values(&out.join("trend_variance_tilde.csv")) {
        let want = 2f64.powi(k as i32).powf(-0.1);
        assert!((v - want).abs() < 1e-12 * want, "{k}");
    }
}

#[test]
fn matched_regime_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = Config::default();
    c.out = dir.path().to_path_buf();
    c.predict.regime = RegimeKind::Matched;
    c.predict.tau = 1024.0;
    let out = run(&c);
    let h = common::header_lines(&out.join("hurst.csv"));
    assert!(h.iter().any(|l| l.contains("heuristic")));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["heuristic_regime"], true);
}

#[test]
fn out_of_range_dimension_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = common::latgas(&["predict", "--dimension", "7", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = common::latgas(&["predict", "--kappa", "1.5", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_documents_every_key() {
    for (cmd, keys) in [
        ("simulate", &["dims", "side", "temperature", "init", "burn_in", "sweeps", "thin"][..]),
        ("predict", &["dimension", "kappa", "tau", "regime", "t_star", "scales"][..]),
        (
            "analyze",
            &[
                "inputs",
                "schema",
                "horizons = [1, ..., 10]",
                "estimator = \"phi\"",
                "bootstrap = 5000",
                "folds = 15",
                "resampling",
                "block_length",
                "qs",
                "kappa_scales",
                "max_moment_horizon",
            ][..],
        ),
        ("fit-kappa", &["input", "column", "scales", "kappa"][..]),
    ] {
        let o = common::latgas(&[cmd, "--help"]);
        assert!(o.status.success());
        let text = String::from_utf8(o.stdout).unwrap();
        for k in keys {
            assert!(text.contains(k), "{cmd}: {k}");
        }
        for flag in ["--config", "--seed", "--out"] {
            assert!(text.contains(flag), "{cmd}: {flag}");
        }
    }
}
