//! Reading files in, cleaned readings out.
//!
//! File timestamps are UTC epoch seconds; nothing here looks at local time.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use chrono_tz::Tz;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::timeseries::{HourlySeries, MeterKind, Timestamp};

pub const ENERGY_HEADER: &str = "timestamp,energy_kwh";
pub const WEATHER_HEADER: &str = "timestamp,temp_c";

/// Default spike bound in kWh per hour-equivalent.
pub const DEFAULT_SPIKE_THRESHOLD: f64 = 100.0;

pub const MIN_TEMP_C: f64 = -60.0;
pub const MAX_TEMP_C: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RawReading<T> {
    pub t: Timestamp,
    pub value: T,
}

impl<T: Scalar> RawReading<T> {
    pub fn new(t: Timestamp, value: T) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Validation(format!("reading at {t} is not finite")));
        }
        Ok(RawReading { t, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Csv,
    JsonLines,
}

impl FileFormat {
    /// `.jsonl` / `.ndjson` are JSON lines, everything else CSV.
    pub fn from_path(path: &Path) -> FileFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("ndjson") => FileFormat::JsonLines,
            _ => FileFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanReport {
    pub input: usize,
    pub duplicates: usize,
    pub kept: usize,
    pub dropped_negative: usize,
    pub dropped_spike: usize,
    pub counter_resets: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeatherReadings<T> {
    pub readings: Vec<RawReading<T>>,
    /// Rows rejected for lying outside the plausible temperature range.
    pub out_of_range: usize,
}

struct Row<T> {
    line: u64,
    t: Timestamp,
    value: Option<T>,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

fn parse_field<V: std::str::FromStr>(path: &Path, line: u64, field: &str, raw: &str) -> Result<V> {
    raw.parse::<V>()
        .map_err(|_| Error::parse(path, line, field, format!("cannot parse `{raw}`")))
}

fn parse_timestamp(path: &Path, line: u64, raw: &str) -> Result<Timestamp> {
    let secs: i64 = parse_field(path, line, "timestamp", raw)?;
    Timestamp::new(secs)
        .map_err(|_| Error::parse(path, line, "timestamp", "negative epoch seconds"))
}

/// Two-column CSV with a fixed header. An empty value field marks a gap.
fn read_csv_rows<T: Scalar>(path: &Path, header: &str) -> Result<Vec<Row<T>>> {
    let value_field = header.split(',').nth(1).unwrap();
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(open(path)?);
    let mut rec = csv::StringRecord::new();
    let mut rows = Vec::new();
    let mut first = true;
    loop {
        let more = rdr.read_record(&mut rec).map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::parse(path, line, "row", e.to_string())
        })?;
        if !more {
            break;
        }
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if first {
            first = false;
            let got: Vec<&str> = rec.iter().collect();
            if got.join(",") != header {
                return Err(Error::parse(
                    path,
                    line,
                    "header",
                    format!("expected `{header}`, found `{}`", got.join(",")),
                ));
            }
            continue;
        }
        if rec.len() != 2 {
            return Err(Error::parse(
                path,
                line,
                "row",
                format!("expected 2 fields, found {}", rec.len()),
            ));
        }
        let t = parse_timestamp(path, line, &rec[0])?;
        let value = if rec[1].is_empty() {
            None
        } else {
            let v: T = parse_field(path, line, value_field, &rec[1])?;
            if !v.is_finite() {
                return Err(Error::parse(path, line, value_field, "value is not finite"));
            }
            Some(v)
        };
        rows.push(Row { line, t, value });
    }
    if first {
        return Err(Error::parse(path, 1, "header", format!("missing header `{header}`")));
    }
    Ok(rows)
}

fn read_jsonl_rows<T: Scalar>(path: &Path) -> Result<Vec<Row<T>>> {
    let mut rows = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let obj: serde_json::Value = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path, line_no, "row", e.to_string()))?;
        let t = obj
            .get("t")
            .and_then(|t| t.as_i64())
            .and_then(|t| Timestamp::new(t).ok())
            .ok_or_else(|| Error::parse(path, line_no, "t", "expected non-negative integer"))?;
        let v = obj
            .get("v")
            .and_then(|v| v.as_f64())
            .and_then(T::from_f64)
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::parse(path, line_no, "v", "expected finite number"))?;
        rows.push(Row {
            line: line_no,
            t,
            value: Some(v),
        });
    }
    Ok(rows)
}

fn rows_to_readings<T: Scalar>(rows: Vec<Row<T>>) -> Vec<RawReading<T>> {
    rows.into_iter()
        .filter_map(|r| r.value.map(|value| RawReading { t: r.t, value }))
        .collect()
}

/// Parses an energy file in file order. Gap rows (empty value) are skipped.
pub fn parse_readings_file<T: Scalar>(path: &Path, format: FileFormat) -> Result<Vec<RawReading<T>>> {
    let rows = match format {
        FileFormat::Csv => read_csv_rows(path, ENERGY_HEADER)?,
        FileFormat::JsonLines => read_jsonl_rows(path)?,
    };
    Ok(rows_to_readings(rows))
}

/// Parses a temperature file, dropping rows outside [-60, 60] °C.
pub fn parse_weather_file<T: Scalar>(path: &Path) -> Result<WeatherReadings<T>> {
    let rows = match FileFormat::from_path(path) {
        FileFormat::Csv => read_csv_rows(path, WEATHER_HEADER)?,
        FileFormat::JsonLines => read_jsonl_rows(path)?,
    };
    let (lo, hi) = (T::of(MIN_TEMP_C), T::of(MAX_TEMP_C));
    let mut out_of_range = 0;
    let readings = rows_to_readings(rows)
        .into_iter()
        .filter(|r| {
            let ok = r.value >= lo && r.value <= hi;
            out_of_range += usize::from(!ok);
            ok
        })
        .collect();
    Ok(WeatherReadings {
        readings,
        out_of_range,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Writes readings as two-column CSV under the given header.
pub fn write_readings_csv<T: Scalar>(path: &Path, header: &str, readings: &[RawReading<T>]) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "{header}").map_err(io)?;
    for r in readings {
        writeln!(w, "{},{}", r.t, r.value).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn write_readings_jsonl<T: Scalar>(path: &Path, readings: &[RawReading<T>]) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    for r in readings {
        writeln!(w, "{{\"t\":{},\"v\":{}}}", r.t, r.value).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Writes every position of a series as an energy CSV row, leaving the value
/// empty for missing hours. The file is itself a valid interval readings file.
pub fn write_series_csv<T: Scalar>(path: &Path, s: &HourlySeries<T>) -> Result<()> {
    let rows: Vec<(Timestamp, Option<T>)> = s.timestamps().into_iter().zip(s.values().iter().copied()).collect();
    write_rows_csv(path, &rows)
}

/// Same format as [`write_series_csv`] for rows that need not form a valid
/// series (e.g. fault-injected values).
pub fn write_rows_csv<T: Scalar>(path: &Path, rows: &[(Timestamp, Option<T>)]) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "{ENERGY_HEADER}").map_err(io)?;
    for (t, v) in rows {
        match v {
            Some(v) => writeln!(w, "{t},{v}"),
            None => writeln!(w, "{t},"),
        }
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Reads a file written by [`write_series_csv`], checking that rows are
/// consecutive local hours of `zone`.
pub fn read_series_csv<T: Scalar>(path: &Path, zone: Tz) -> Result<HourlySeries<T>> {
    let rows: Vec<Row<T>> = read_csv_rows(path, ENERGY_HEADER)?;
    let Some(first) = rows.first() else {
        return Err(Error::InsufficientData(format!(
            "{}: series file has no rows",
            path.display()
        )));
    };
    let series = HourlySeries::new(first.t, zone, rows.iter().map(|r| r.value).collect())
        .map_err(|e| Error::parse(path, first.line, "timestamp", e.to_string()))?;
    for (row, expect) in rows.iter().zip(series.timestamps()) {
        if row.t != expect {
            return Err(Error::parse(
                path,
                row.line,
                "timestamp",
                format!("expected consecutive hour {expect}, found {}", row.t),
            ));
        }
    }
    Ok(series)
}

/// One interval reading at the start of each present hour.
pub fn series_readings<T: Scalar>(s: &HourlySeries<T>) -> Vec<RawReading<T>> {
    s.timestamps()
        .into_iter()
        .zip(s.values())
        .filter_map(|(t, v)| v.map(|value| RawReading { t, value }))
        .collect()
}

/// Sorts, deduplicates (last wins) and drops implausible readings.
///
/// Interval kind: negative values and values above `spike_threshold` are dropped.
/// Cumulative kind: negative register values are dropped; a decrease is a
/// counter reset and later readings are rebased onto the last kept value (the
/// energy across the reset itself is unknown and counts as zero); a rise faster
/// than `spike_threshold` per hour (per reading when less than an hour apart)
/// is a spike.
pub fn clean_readings<T: Scalar>(
    rs: &[RawReading<T>],
    kind: MeterKind,
    spike_threshold: T,
) -> (Vec<RawReading<T>>, CleanReport) {
    let mut report = CleanReport {
        input: rs.len(),
        ..CleanReport::default()
    };
    let mut sorted = rs.to_vec();
    sorted.sort_by_key(|r| r.t);
    let mut deduped: Vec<RawReading<T>> = Vec::with_capacity(sorted.len());
    for r in sorted {
        match deduped.last_mut() {
            Some(last) if last.t == r.t => {
                *last = r;
                report.duplicates += 1;
            }
            _ => deduped.push(r),
        }
    }

    let mut kept = Vec::with_capacity(deduped.len());
    match kind {
        MeterKind::Interval => {
            for r in deduped {
                if r.value < T::zero() {
                    report.dropped_negative += 1;
                } else if r.value > spike_threshold {
                    report.dropped_spike += 1;
                } else {
                    kept.push(r);
                }
            }
        }
        MeterKind::Cumulative => {
            let mut offset = T::zero();
            // (last kept raw value, last kept output)
            let mut last: Option<(T, RawReading<T>)> = None;
            for r in deduped {
                if r.value < T::zero() {
                    report.dropped_negative += 1;
                    continue;
                }
                let Some((last_raw, last_out)) = last else {
                    kept.push(r);
                    last = Some((r.value, r));
                    continue;
                };
                let mut this_offset = offset;
                let reset = r.value < last_raw;
                if reset {
                    this_offset = last_out.value - r.value;
                }
                // clamp keeps the output monotone under rounding
                let out = RawReading {
                    t: r.t,
                    value: (r.value + this_offset).max(last_out.value),
                };
                let hours = T::of((r.t.secs() - last_out.t.secs()) as f64 / 3600.0).max(T::one());
                if out.value - last_out.value > spike_threshold * hours {
                    report.dropped_spike += 1;
                    continue;
                }
                if reset {
                    report.counter_resets += 1;
                    offset = this_offset;
                }
                kept.push(out);
                last = Some((r.value, out));
            }
        }
    }
    report.kept = kept.len();
    (kept, report)
}
