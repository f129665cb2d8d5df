use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::Datelike;
use chrono_tz::Tz;

use super::synthesis::month_keys;
use super::{BaselineYear, Layout, MonthBlock};
use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::timeseries::local_hour_of;

pub const PAPER_LITERAL_HEADER: &str = "month,week,day,hour,kwh";
pub const CALENDAR_HEADER: &str = "timestamp,kwh";

/// Paper-literal rows are `month (1-12), week (1-4), day (1 = Monday .. 7), hour (0-23), kwh`;
/// calendar rows are `timestamp, kwh`.
pub fn write_baseline_csv<T: Scalar>(path: &Path, b: &BaselineYear<T>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    match b.layout {
        Layout::PaperLiteral => {
            writeln!(w, "{PAPER_LITERAL_HEADER}").map_err(io)?;
            for block in &b.months {
                for (k, v) in block.keys.iter().zip(&block.values) {
                    writeln!(
                        w,
                        "{},{},{},{},{}",
                        block.month,
                        k.week + 1,
                        k.slot.day.index() + 1,
                        k.slot.hour,
                        v
                    )
                    .map_err(io)?;
                }
            }
        }
        Layout::Calendar { .. } => {
            writeln!(w, "{CALENDAR_HEADER}").map_err(io)?;
            for block in &b.months {
                for (k, v) in block.keys.iter().zip(&block.values) {
                    writeln!(w, "{},{}", k.timestamp.expect("calendar keys carry timestamps"), v)
                        .map_err(io)?;
                }
            }
        }
    }
    w.flush().map_err(io)
}

fn parse_num<V: std::str::FromStr>(path: &Path, line: u64, field: &str, raw: Option<&str>) -> Result<V> {
    let raw = raw.ok_or_else(|| Error::parse(path, line, field, "missing field"))?;
    raw.parse()
        .map_err(|_| Error::parse(path, line, field, format!("cannot parse `{raw}`")))
}

/// Reads a baseline written by [`write_baseline_csv`]. The layout is taken
/// from the header; calendar files are interpreted in `zone`.
pub fn read_baseline_csv<T: Scalar>(path: &Path, zone: Tz) -> Result<BaselineYear<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i as u64 + 1, l));
    let header = lines.next().map(|(_, l)| l).unwrap_or("");
    let rows: Vec<(u64, &str)> = lines.filter(|(_, l)| !l.is_empty()).collect();

    let (layout, parsed): (Layout, Vec<(u64, Vec<String>, T)>) = match header {
        PAPER_LITERAL_HEADER => (Layout::PaperLiteral, split_rows(path, &rows, 5)?),
        CALENDAR_HEADER => {
            let parsed = split_rows(path, &rows, 2)?;
            let Some((line, first, _)) = parsed.first() else {
                return Err(Error::Schema(format!("{}: baseline has no rows", path.display())));
            };
            let t0: i64 = parse_num(path, *line, "timestamp", Some(&first[0]))?;
            let year = local_hour_of(t0, zone).year();
            (Layout::Calendar { year, zone }, parsed)
        }
        other => {
            return Err(Error::parse(
                path,
                1,
                "header",
                format!("expected `{PAPER_LITERAL_HEADER}` or `{CALENDAR_HEADER}`, found `{other}`"),
            ))
        }
    };

    let mut it = parsed.into_iter();
    let mut months = Vec::with_capacity(12);
    for month in 1..=12u32 {
        let keys = month_keys(&layout, month);
        let mut values = Vec::with_capacity(keys.len());
        for k in &keys {
            let (line, fields, v) = it.next().ok_or_else(|| {
                Error::Schema(format!("{}: baseline ends before month {month} is complete", path.display()))
            })?;
            let expected: Vec<String> = match layout {
                Layout::PaperLiteral => vec![
                    month.to_string(),
                    (k.week + 1).to_string(),
                    (k.slot.day.index() + 1).to_string(),
                    k.slot.hour.to_string(),
                ],
                Layout::Calendar { .. } => vec![k.timestamp.unwrap().to_string()],
            };
            if fields != expected {
                let day = k.slot.day;
                return Err(Error::parse(
                    path,
                    line,
                    "row",
                    format!(
                        "expected row for month {month} week {} {day:?} {:02}:00 ({}), found {}",
                        k.week + 1,
                        k.slot.hour,
                        expected.join(","),
                        fields.join(",")
                    ),
                ));
            }
            values.push(v);
        }
        months.push(MonthBlock { month, keys, values });
    }
    if let Some((line, _, _)) = it.next() {
        return Err(Error::parse(path, line, "row", "rows beyond the end of the year"));
    }
    Ok(BaselineYear {
        layout,
        generation: None,
        months,
    })
}

fn split_rows<T: Scalar>(path: &Path, rows: &[(u64, &str)], width: usize) -> Result<Vec<(u64, Vec<String>, T)>> {
    rows.iter()
        .map(|&(line, l)| {
            let fields: Vec<&str> = l.split(',').collect();
            if fields.len() != width {
                return Err(Error::parse(
                    path,
                    line,
                    "row",
                    format!("expected {width} fields, found {}", fields.len()),
                ));
            }
            let v: T = parse_num(path, line, "kwh", fields.last().copied())?;
            if !(v.is_finite() && v >= T::zero()) {
                return Err(Error::parse(path, line, "kwh", "must be finite and non-negative"));
            }
            Ok((line, fields[..width - 1].iter().map(|s| s.to_string()).collect(), v))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::{sample_stochastic, synthesize_baseline, SlotSamplePool, WeeklyDistribution};
    use crate::timeseries::{parse_zone, MonthlyTotals};

    fn totals() -> MonthlyTotals<f64> {
        MonthlyTotals::from_observed(std::array::from_fn(|i| Some(250.0 + 3.3 * i as f64))).unwrap()
    }

    fn roundtrip(b: &BaselineYear<f64>, zone: Tz) {
        let f = tempfile::NamedTempFile::new().unwrap();
        write_baseline_csv(f.path(), b).unwrap();
        let back: BaselineYear<f64> = read_baseline_csv(f.path(), zone).unwrap();
        assert_eq!(back.layout, b.layout);
        assert_eq!(back.months, b.months);
        let g = tempfile::NamedTempFile::new().unwrap();
        write_baseline_csv(g.path(), &back).unwrap();
        assert_eq!(std::fs::read(f.path()).unwrap(), std::fs::read(g.path()).unwrap());
    }

    #[test]
    fn paper_literal_roundtrip() {
        let pool = SlotSamplePool::new((0..168).map(|i| vec![0.1 + i as f64 / 97.0]).collect()).unwrap();
        let b = sample_stochastic(&pool, &totals(), &Layout::PaperLiteral, 11).unwrap();
        roundtrip(&b, chrono_tz::UTC);
    }

    #[test]
    fn calendar_roundtrip() {
        let zone = parse_zone("Europe/Athens").unwrap();
        let b = synthesize_baseline(&WeeklyDistribution::uniform(), &totals(), &Layout::Calendar { year: 2019, zone }).unwrap();
        roundtrip(&b, zone);
    }

    #[test]
    fn truncated_file_rejected() {
        let b = synthesize_baseline(&WeeklyDistribution::uniform(), &totals(), &Layout::PaperLiteral).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        write_baseline_csv(f.path(), &b).unwrap();
        let text = std::fs::read_to_string(f.path()).unwrap();
        let cut: String = text.lines().take(100).map(|l| format!("{l}\n")).collect();
        std::fs::write(f.path(), cut).unwrap();
        assert!(read_baseline_csv::<f64>(f.path(), chrono_tz::UTC).is_err());
    }
}
