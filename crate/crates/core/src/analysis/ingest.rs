//! Best bid/offer ingestion: CSV quotes → weekday filter → uniform mid grid.
//!
//! Input files carry a required header `timestamp_us,bid,ask`, timestamps in
//! UTC epoch microseconds, non-decreasing.

use std::path::Path;

use chrono::{DateTime, Datelike, Weekday};

use super::series::PriceSeries;
use crate::error::{ensure, Error, Result};

pub const QUOTE_HEADER: [&str; 3] = ["timestamp_us", "bid", "ask"];

/// Default staleness limit beyond which a series is split, in seconds.
pub const DEFAULT_MAX_GAP_S: f64 = 600.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuoteRecord {
    pub timestamp_us: i64,
    pub bid: f64,
    pub ask: f64,
}

impl QuoteRecord {
    pub fn mid(&self) -> f64 {
        0.5 * (self.bid + self.ask)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Malformed {
    pub line: u64,
    pub reason: String,
}

/// Parsed quote file: accepted records in file order plus rejected lines.
#[derive(Debug, Clone, Default)]
pub struct QuoteFile {
    pub records: Vec<QuoteRecord>,
    pub malformed: Vec<Malformed>,
}

/// Reads a quote file. Rejected rows are reported in [`QuoteFile::malformed`];
/// more than 1% rejected is a hard error.
pub fn load_quotes(path: impl AsRef<Path>) -> Result<QuoteFile> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(std::io::BufReader::new(file));

    let header = reader.headers().map_err(|e| parse_error(path, 1, e))?.clone();
    if header.iter().ne(QUOTE_HEADER) {
        return Err(Error::Parse {
            path: path.into(),
            line: 1,
            message: format!("expected header `{}`, found `{}`", QUOTE_HEADER.join(","), header.iter().collect::<Vec<_>>().join(",")),
        });
    }

    let mut out = QuoteFile::default();
    let mut total = 0usize;
    let mut last_ts = i64::MIN;
    let mut row = csv::StringRecord::new();
    loop {
        match reader.read_record(&mut row) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                return Err(parse_error(path, line, e));
            }
        }
        total += 1;
        let line = row.position().map_or(0, |p| p.line());
        match parse_row(&row, last_ts) {
            Ok(rec) => {
                last_ts = rec.timestamp_us;
                out.records.push(rec);
            }
            Err(reason) => out.malformed.push(Malformed { line, reason }),
        }
    }

    if out.malformed.len() * 100 > total {
        return Err(Error::TooManyMalformed {
            path: path.into(),
            malformed: out.malformed.len(),
            total,
            lines: out.malformed.iter().take(20).map(|m| m.line).collect(),
        });
    }
    Ok(out)
}

fn parse_error(path: &Path, line: u64, e: csv::Error) -> Error {
    Error::Parse {
        path: path.into(),
        line,
        message: e.to_string(),
    }
}

fn parse_row(row: &csv::StringRecord, last_ts: i64) -> Result<QuoteRecord, String> {
    if row.len() != 3 {
        return Err(format!("expected 3 fields, found {}", row.len()));
    }
    let timestamp_us: i64 = row[0].parse().map_err(|_| format!("bad timestamp `{}`", &row[0]))?;
    let bid: f64 = row[1].parse().map_err(|_| format!("bad bid `{}`", &row[1]))?;
    let ask: f64 = row[2].parse().map_err(|_| format!("bad ask `{}`", &row[2]))?;
    if !(bid > 0.0 && bid.is_finite() && ask.is_finite()) {
        return Err(format!("non-positive or non-finite price (bid {bid}, ask {ask})"));
    }
    if ask < bid {
        return Err(format!("crossed quote: ask {ask} < bid {bid}"));
    }
    if timestamp_us < last_ts {
        return Err(format!("timestamp {timestamp_us} goes backwards (previous {last_ts})"));
    }
    Ok(QuoteRecord { timestamp_us, bid, ask })
}

/// True on Saturday and Sunday, UTC.
pub fn is_weekend(timestamp_us: i64) -> bool {
    DateTime::from_timestamp_micros(timestamp_us)
        .is_some_and(|t| matches!(t.weekday(), Weekday::Sat | Weekday::Sun))
}

/// Drops quotes stamped on a Saturday or Sunday (UTC, midnight boundaries).
pub fn filter_weekends(records: impl IntoIterator<Item = QuoteRecord>) -> Vec<QuoteRecord> {
    records
        .into_iter()
        .filter(|r| !is_weekend(r.timestamp_us))
        .collect()
}

/// Grid and staleness settings for [`to_mid_series_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resample {
    /// Grid step in seconds; grid points are whole multiples of it since the epoch.
    pub dt: f64,
    /// A quote older than this no longer covers a grid point, and a silence
    /// this long between quotes starts a new segment.
    pub max_gap: f64,
    /// Last grid point (inclusive). Defaults to the last quote.
    pub end_us: Option<i64>,
    /// Leave Saturday and Sunday grid points uncovered, so a Friday quote
    /// is not carried into the weekend.
    pub skip_weekends: bool,
}

impl Resample {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            max_gap: DEFAULT_MAX_GAP_S,
            end_us: None,
            skip_weekends: false,
        }
    }
}

/// Mid prices `(bid + ask)/2` on a uniform `dt` grid, last observation carried forward.
pub fn to_mid_series(records: &[QuoteRecord], dt: f64) -> Result<PriceSeries> {
    to_mid_series_with(records, &Resample::new(dt))
}

pub fn to_mid_series_with(records: &[QuoteRecord], cfg: &Resample) -> Result<PriceSeries> {
    ensure(cfg.dt > 0.0, "dt", "must be > 0", cfg.dt)?;
    ensure(cfg.max_gap > 0.0, "max_gap", "must be > 0", cfg.max_gap)?;
    let step = (cfg.dt * 1e6).round() as i64;
    if step < 1 || (step as f64 - cfg.dt * 1e6).abs() > 1e-6 {
        return Err(Error::invalid("dt", "must be a whole number of microseconds", cfg.dt));
    }
    let (Some(first), Some(last)) = (records.first(), records.last()) else {
        return Err(Error::Degenerate("no quotes to resample".into()));
    };
    let max_gap_us = (cfg.max_gap * 1e6).round() as i64;
    let start = first.timestamp_us.div_euclid(step) * step
        + if first.timestamp_us.rem_euclid(step) == 0 { 0 } else { step };
    let end = cfg.end_us.unwrap_or(last.timestamp_us).div_euclid(step) * step;
    if end < start {
        return Err(Error::Degenerate("no grid point falls after the first quote".into()));
    }
    let n = ((end - start) / step) as usize + 1;

    let mut mids = vec![f64::NAN; n];
    let mut segments = Vec::new();
    let mut seg_start: Option<usize> = None;
    let mut epoch = 0u64;
    let mut seg_epoch = 0u64;
    let mut next = 0usize; // first record not yet at or before the grid point
    let mut prev_ts: Option<i64> = None;
    for (i, mid) in mids.iter_mut().enumerate() {
        let g = start + step * i as i64;
        while next < records.len() && records[next].timestamp_us <= g {
            let ts = records[next].timestamp_us;
            if prev_ts.is_some_and(|p| ts - p > max_gap_us) {
                epoch += 1;
            }
            prev_ts = Some(ts);
            next += 1;
        }
        let covered = next > 0
            && g - records[next - 1].timestamp_us <= max_gap_us
            && !(cfg.skip_weekends && is_weekend(g));
        if covered {
            *mid = records[next - 1].mid();
        }
        match (covered, seg_start) {
            (true, None) => {
                seg_start = Some(i);
                seg_epoch = epoch;
            }
            (true, Some(s)) if seg_epoch != epoch => {
                segments.push(s..i);
                seg_start = Some(i);
                seg_epoch = epoch;
            }
            (false, Some(s)) => {
                segments.push(s..i);
                seg_start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = seg_start {
        segments.push(s..n);
    }
    if let Some(&bad) = mids.iter().find(|m| **m <= 0.0) {
        return Err(Error::invalid("mid", "must be > 0", bad));
    }
    PriceSeries::with_segments(start, cfg.dt, mids, segments)
}
