//! Daily price tables from CSV.
//!
//! Two layouts are accepted:
//!
//! - long: one row per observation with columns `market,date,price` in any
//!   order;
//! - wide: a `date` column followed by one column per market, empty cells
//!   meaning no observation.
//!
//! Dates are ISO-8601 days. Lines starting with `#` are comments.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schema {
    Long,
    Wide,
}

impl std::str::FromStr for Schema {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "long" => Ok(Schema::Long),
            "wide" => Ok(Schema::Wide),
            other => Err(format!("unknown schema `{other}` (expected long or wide)")),
        }
    }
}

impl std::fmt::Display for Schema {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Schema::Long => "long",
            Schema::Wide => "wide",
        })
    }
}

/// A run of calendar days on which a market has no price although it traded
/// before and after.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Gap {
    pub first: NaiveDate,
    pub last: NaiveDate,
    pub days: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarketSeries {
    pub name: String,
    /// Strictly increasing.
    pub dates: Vec<NaiveDate>,
    pub prices: Vec<f64>,
    pub gaps: Vec<Gap>,
}

impl MarketSeries {
    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    /// `ln(P_t/P_{t−1})` between consecutive observations. A return that
    /// spans a gap is kept as a single day's return.
    pub fn log_returns(&self) -> Vec<f64> {
        self.prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect()
    }
}

/// Validated prices for one or more markets on a shared calendar.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceTable {
    pub markets: Vec<MarketSeries>,
    /// Union of all dates, increasing. Global day indices refer to it.
    pub calendar: Vec<NaiveDate>,
    pub source: PathBuf,
    pub sha256: String,
}

impl PriceTable {
    /// Calendar index of every date of `market`.
    pub fn day_indices(&self, market: usize) -> Vec<usize> {
        let m = &self.markets[market];
        let mut out = Vec::with_capacity(m.len());
        let mut j = 0;
        for d in &m.dates {
            while self.calendar[j] < *d {
                j += 1;
            }
            out.push(j);
        }
        out
    }
}

fn invalid(path: &Path, line: Option<u64>, msg: impl std::fmt::Display) -> CliError {
    match line {
        Some(l) => CliError::Validation(format!("{}:{l}: {msg}", path.display())),
        None => CliError::Validation(format!("{}: {msg}", path.display())),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn parse_date(s: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| format!("invalid date `{s}` (expected YYYY-MM-DD)"))
}

fn parse_price(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|_| format!("invalid price `{s}`"))?;
    if !p.is_finite() {
        return Err(format!("price `{s}` is not finite"));
    }
    if p <= 0.0 {
        return Err(format!("price must be positive, got {s}"));
    }
    Ok(p)
}

// (date, price, line) per market, in first-appearance order of the markets.
type Raw = Vec<(String, Vec<(NaiveDate, f64, u64)>)>;

pub fn load_price_csv(path: &Path, schema: Schema) -> Result<PriceTable, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
    let sha256 = sha256_hex(&bytes);
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(invalid(path, None, "empty file"));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(bytes.as_slice());
    let header = reader.headers().map_err(|e| invalid(path, Some(1), e))?.clone();
    let header_line = reader.position().line().saturating_sub(1).max(1);
    let raw = match schema {
        Schema::Long => read_long(path, &mut reader, &header, header_line)?,
        Schema::Wide => read_wide(path, &mut reader, &header, header_line)?,
    };
    build(path, raw, sha256)
}

fn column(header: &csv::StringRecord, name: &str) -> Option<usize> {
    header.iter().position(|h| h.eq_ignore_ascii_case(name))
}

fn read_long(
    path: &Path,
    reader: &mut csv::Reader<&[u8]>,
    header: &csv::StringRecord,
    header_line: u64,
) -> Result<Raw, CliError> {
    let find = |name| column(header, name).ok_or_else(|| invalid(path, Some(header_line), format!("missing `{name}` column")));
    let (mc, dc, pc) = (find("market")?, find("date")?, find("price")?);
    let mut raw: Raw = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| invalid(path, e.position().map(|p| p.line()), e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(invalid(path, Some(line), format!("expected {} fields, found {}", header.len(), rec.len())));
        }
        let market = &rec[mc];
        if market.is_empty() {
            return Err(invalid(path, Some(line), "empty market name"));
        }
        let date = parse_date(&rec[dc]).map_err(|m| invalid(path, Some(line), m))?;
        let price = parse_price(&rec[pc]).map_err(|m| invalid(path, Some(line), m))?;
        let i = *index.entry(market.to_string()).or_insert_with(|| {
            raw.push((market.to_string(), Vec::new()));
            raw.len() - 1
        });
        raw[i].1.push((date, price, line));
    }
    Ok(raw)
}

fn read_wide(
    path: &Path,
    reader: &mut csv::Reader<&[u8]>,
    header: &csv::StringRecord,
    header_line: u64,
) -> Result<Raw, CliError> {
    if header.len() < 2 || !header[0].eq_ignore_ascii_case("date") {
        return Err(invalid(path, Some(header_line), "wide layout needs a `date` column followed by market columns"));
    }
    let mut raw: Raw = Vec::new();
    for name in header.iter().skip(1) {
        if name.is_empty() {
            return Err(invalid(path, Some(header_line), "empty market name in header"));
        }
        if raw.iter().any(|(n, _)| n == name) {
            return Err(invalid(path, Some(header_line), format!("market `{name}` appears twice")));
        }
        raw.push((name.to_string(), Vec::new()));
    }
    for rec in reader.records() {
        let rec = rec.map_err(|e| invalid(path, e.position().map(|p| p.line()), e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(invalid(path, Some(line), format!("expected {} fields, found {}", header.len(), rec.len())));
        }
        let date = parse_date(&rec[0]).map_err(|m| invalid(path, Some(line), m))?;
        for (j, cell) in rec.iter().enumerate().skip(1) {
            if cell.is_empty() {
                continue;
            }
            let price = parse_price(cell).map_err(|m| invalid(path, Some(line), format!("{}: {m}", &header[j])))?;
            raw[j - 1].1.push((date, price, line));
        }
    }
    Ok(raw)
}

fn build(path: &Path, raw: Raw, sha256: String) -> Result<PriceTable, CliError> {
    if raw.iter().all(|(_, rows)| rows.is_empty()) {
        return Err(invalid(path, None, "no price rows"));
    }
    let mut calendar: Vec<NaiveDate> = raw.iter().flat_map(|(_, rows)| rows.iter().map(|r| r.0)).collect();
    calendar.sort_unstable();
    calendar.dedup();
    let mut markets = Vec::with_capacity(raw.len());
    for (name, mut rows) in raw {
        if rows.is_empty() {
            log::warn!("market `{name}` has no prices and is ignored");
            continue;
        }
        rows.sort_by_key(|r| (r.0, r.2));
        if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(invalid(
                path,
                Some(w[1].2),
                format!("duplicate date {} for market `{name}` (first seen on line {})", w[0].0, w[0].2),
            ));
        }
        let dates: Vec<NaiveDate> = rows.iter().map(|r| r.0).collect();
        let prices = rows.iter().map(|r| r.1).collect();
        let gaps = find_gaps(&calendar, &dates);
        markets.push(MarketSeries { name, dates, prices, gaps });
    }
    Ok(PriceTable { markets, calendar, source: path.to_path_buf(), sha256 })
}

fn find_gaps(calendar: &[NaiveDate], dates: &[NaiveDate]) -> Vec<Gap> {
    let start = calendar.partition_point(|d| *d < dates[0]);
    let end = calendar.partition_point(|d| *d <= dates[dates.len() - 1]);
    let mut gaps = Vec::new();
    let mut j = 0;
    let mut open: Option<(NaiveDate, NaiveDate, usize)> = None;
    for &day in &calendar[start..end] {
        if dates[j] == day {
            j += 1;
            if let Some((first, last, days)) = open.take() {
                gaps.push(Gap { first, last, days });
            }
        } else {
            open = Some(match open {
                Some((first, _, days)) => (first, day, days + 1),
                None => (day, day, 1),
            });
        }
    }
    gaps
}
