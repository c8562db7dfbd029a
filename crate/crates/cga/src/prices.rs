//! Price and sector CSV files.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use cga_core::market::{self, ScenarioKind};
use cga_core::{ReturnKind, ReturnMatrix};
use chrono::{Datelike, Days, NaiveDate, Weekday};

use crate::error::{Error, Result};

pub const UNKNOWN_SECTOR: &str = "UNKNOWN";
const DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Clone, Debug, PartialEq)]
pub struct PriceSeries {
    pub asset_id: String,
    pub sector: String,
    pub dates: Vec<NaiveDate>,
    pub closes: Vec<f64>,
}

fn malformed(path: &Path, reason: impl Into<String>) -> Error {
    Error::MalformedCsv { path: path.to_path_buf(), reason: reason.into() }
}

fn reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(Error::io(path))?;
    Ok(csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(file))
}

/// Reads an `asset,sector` file.
pub fn load_sectors(path: &Path) -> Result<BTreeMap<String, String>> {
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| malformed(path, e.to_string()))?.clone();
    if header.len() != 2 || &header[0] != "asset" || &header[1] != "sector" {
        return Err(malformed(path, "expected header `asset,sector`"));
    }
    let mut map = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| malformed(path, e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 2 || rec[0].is_empty() {
            return Err(malformed(path, format!("line {line}: expected 2 fields, found {}", rec.len())));
        }
        map.insert(rec[0].to_string(), rec[1].to_string());
    }
    Ok(map)
}

/// Reads a `date,ASSET1,ASSET2,...` close-price file.
pub fn load_prices(path: &Path, sector_map: Option<&Path>) -> Result<Vec<PriceSeries>> {
    let sectors = sector_map.map(load_sectors).transpose()?.unwrap_or_default();
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| malformed(path, e.to_string()))?.clone();
    if header.len() < 2 || &header[0] != "date" {
        return Err(malformed(path, "header must be `date` followed by at least one asset"));
    }
    let mut seen = HashSet::new();
    for a in header.iter().skip(1) {
        if a.is_empty() || !seen.insert(a) {
            return Err(malformed(path, format!("empty or repeated asset name `{a}`")));
        }
    }
    let mut series: Vec<PriceSeries> = header
        .iter()
        .skip(1)
        .map(|a| PriceSeries {
            asset_id: a.to_string(),
            sector: sectors.get(a).cloned().unwrap_or_else(|| UNKNOWN_SECTOR.to_string()),
            dates: Vec::new(),
            closes: Vec::new(),
        })
        .collect();
    let mut dates: Vec<NaiveDate> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| malformed(path, e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(malformed(path, format!("line {line}: expected {} fields, found {}", header.len(), rec.len())));
        }
        let date = NaiveDate::parse_from_str(&rec[0], DATE_FORMAT)
            .map_err(|e| malformed(path, format!("line {line}: bad date `{}`: {e}", &rec[0])))?;
        if dates.last().is_some_and(|&d| d >= date) {
            return Err(Error::NonMonotonicDates { path: path.to_path_buf(), date: rec[0].to_string() });
        }
        dates.push(date);
        for (s, cell) in series.iter_mut().zip(rec.iter().skip(1)) {
            if cell.is_empty() {
                return Err(malformed(path, format!("line {line}: missing close for {}", s.asset_id)));
            }
            let value: f64 =
                cell.parse().map_err(|_| malformed(path, format!("line {line}: bad close `{cell}` for {}", s.asset_id)))?;
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositivePrice { path: path.to_path_buf(), asset: s.asset_id.clone(), line, value });
            }
            s.closes.push(value);
        }
    }
    for s in &mut series {
        s.dates = dates.clone();
    }
    Ok(series)
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(Error::io(path))?;
    Ok(csv::Writer::from_writer(file))
}

pub(crate) fn csv_error(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::IoFailure { path: path.to_path_buf(), reason: e.to_string() }
}

/// Writes series sharing one date vector in the format read by [`load_prices`].
pub fn write_prices(path: &Path, series: &[PriceSeries]) -> Result<()> {
    let dates = series.first().map(|s| s.dates.as_slice()).unwrap_or_default();
    check_aligned(series)?;
    let mut w = writer(path)?;
    let err = csv_error(path);
    let mut header = vec!["date".to_string()];
    header.extend(series.iter().map(|s| s.asset_id.clone()));
    w.write_record(&header).map_err(&err)?;
    for (t, d) in dates.iter().enumerate() {
        let mut row = vec![d.format(DATE_FORMAT).to_string()];
        row.extend(series.iter().map(|s| s.closes[t].to_string()));
        w.write_record(&row).map_err(&err)?;
    }
    w.flush().map_err(Error::io(path))
}

pub fn write_sectors(path: &Path, series: &[PriceSeries]) -> Result<()> {
    let mut w = writer(path)?;
    let err = csv_error(path);
    w.write_record(["asset", "sector"]).map_err(&err)?;
    for s in series {
        w.write_record([&s.asset_id, &s.sector]).map_err(&err)?;
    }
    w.flush().map_err(Error::io(path))
}

fn check_aligned(series: &[PriceSeries]) -> Result<()> {
    let Some(first) = series.first() else { return Ok(()) };
    for s in series {
        if s.dates != first.dates || s.closes.len() != s.dates.len() {
            return Err(Error::DateMisalignment { asset: s.asset_id.clone(), reference: first.asset_id.clone() });
        }
    }
    Ok(())
}

pub fn compute_returns(series: &[PriceSeries], kind: ReturnKind) -> Result<ReturnMatrix> {
    check_aligned(series)?;
    let assets = series.iter().map(|s| s.asset_id.clone()).collect();
    let closes: Vec<Vec<f64>> = series.iter().map(|s| s.closes.clone()).collect();
    if closes.is_empty() {
        return Err(cga_core::Error::InsufficientHistory { needed: 2, have: 0 }.into());
    }
    Ok(ReturnMatrix::from_closes(assets, &closes, kind)?)
}

const SYNTH_SECTORS: [&str; 6] = ["Energy", "Financials", "Industrials", "Technology", "Consumer", "Healthcare"];

/// Weekdays starting at `start` (or the first weekday after it).
pub fn business_days(start: NaiveDate, count: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(count);
    let mut d = start;
    while out.len() < count {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d + Days::new(1);
    }
    out
}

/// Synthetic scenario with `periods` business-day closes per asset.
pub fn synth_scenario(kind: ScenarioKind, n: usize, periods: usize, seed: u64) -> Result<Vec<PriceSeries>> {
    let scenario = market::synth_scenario(kind, n, periods, seed)?;
    let dates = business_days(NaiveDate::from_ymd_opt(2020, 1, 1).expect("valid date"), periods);
    let width = n.to_string().len();
    Ok(scenario
        .closes
        .into_iter()
        .enumerate()
        .map(|(i, closes)| PriceSeries {
            asset_id: format!("S{:0width$}", i + 1),
            sector: SYNTH_SECTORS[i % SYNTH_SECTORS.len()].to_string(),
            dates: dates.clone(),
            closes,
        })
        .collect())
}
