mod common;

use latgas_cli::{load_price_csv, CliError, Schema};

#[test]
fn two_prices_give_one_log_return() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    std::fs::write(&path, "market,date,price\nES,2020-01-02,100\nES,2020-01-03,110\n").unwrap();
    let table = load_price_csv(&path, Schema::Long).unwrap();
    let r = table.markets[0].log_returns();
    assert_eq!(r.len(), 1);
    assert!((r[0] - 1.1f64.ln()).abs() < 1e-15);
}

#[test]
fn duplicate_date_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    std::fs::write(&path, "market,date,price\nES,2020-01-02,100\nES,2020-01-03,101\nES,2020-01-03,102\n").unwrap();
    match load_price_csv(&path, Schema::Long) {
        Err(e @ CliError::Validation(_)) => {
            let m = e.to_string();
            assert!(m.contains("2020-01-03"), "{m}");
            assert!(m.contains(":4:"), "{m}");
            assert_eq!(e.exit_code(), 2);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn wide_ragged_starts_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let names = common::market_names(3);
    let full: Vec<Option<f64>> = (0..50).map(|i| Some(100.0 + i as f64 * 0.25)).collect();
    let mut late = full.clone();
    late[..10].iter_mut().for_each(|p| *p = None);
    let mut later = full.clone();
    later[..31].iter_mut().for_each(|p| *p = None);
    common::write_wide(&path, &names, &[full.clone(), late.clone(), later.clone()]);
    let table = load_price_csv(&path, Schema::Wide).unwrap();
    let lens: Vec<usize> = table.markets.iter().map(|m| m.len()).collect();
    assert_eq!(lens, vec![50, 40, 19]);
    for (m, col) in table.markets.iter().zip([&full, &late, &later]) {
        let want: Vec<f64> = col.iter().flatten().copied().collect();
        assert_eq!(m.prices, want);
        assert!(m.gaps.is_empty());
    }
    assert_eq!(table.markets[1].dates[0], common::dates(50)[10]);
    assert_eq!(table.day_indices(2)[0], 31);
}

#[test]
fn unreadable_file_is_a_runtime_error() {
    let err = load_price_csv(std::path::Path::new("/nonexistent/prices.csv"), Schema::Long).unwrap_err();
    assert_eq!(err.exit_code(), 1);
}
