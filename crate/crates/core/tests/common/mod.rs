#![allow(dead_code)]

use std::path::PathBuf;

use chrono::{Datelike, TimeZone, Timelike};
use chrono_tz::Tz;
use household_baseline::{HourlySeries, Timestamp};

pub const ATHENS: Tz = chrono_tz::Europe::Athens;
pub const WINDOW_START: i64 = 1_591_804_800;
pub const WINDOW_END: i64 = 1_592_204_400;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

/// Deterministic noise in [-1, 1) from an integer key (splitmix64 finalizer).
pub fn noise(key: u64) -> f64 {
    let mut z = key.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

/// Plausible household load for the local hour starting at `t`.
pub fn household_kwh(t: i64, zone: Tz) -> f64 {
    let local = zone.timestamp_opt(t, 0).unwrap();
    let hour = local.hour() as usize;
    const DAILY: [f64; 24] = [
        0.30, 0.25, 0.22, 0.20, 0.20, 0.24, 0.38, 0.62, 0.70, 0.50, 0.42, 0.40, 0.45, 0.50, 0.44,
        0.40, 0.46, 0.60, 0.80, 0.95, 0.98, 0.85, 0.62, 0.42,
    ];
    const SEASON: [f64; 12] = [1.30, 1.20, 1.05, 0.90, 0.85, 1.00, 1.30, 1.35, 1.00, 0.90, 1.05, 1.25];
    let weekend = local.weekday().num_days_from_monday() >= 5;
    let day_factor = if weekend { 1.15 } else { 1.0 };
    let v = DAILY[hour] * SEASON[local.month0() as usize] * day_factor * (1.0 + 0.2 * noise(t as u64));
    (v * 1e6).round() / 1e6
}

/// Hourly ground truth for a whole local calendar year.
pub fn ground_truth_year(year: i32, zone: Tz) -> HourlySeries<f64> {
    let start = zone.with_ymd_and_hms(year, 1, 1, 0, 0, 0).unwrap().timestamp();
    let end = zone.with_ymd_and_hms(year + 1, 1, 1, 0, 0, 0).unwrap().timestamp();
    let stamps = hour_starts(start, end, zone);
    let values = stamps.iter().map(|t| Some(household_kwh(*t, zone))).collect();
    HourlySeries::new(Timestamp::new(start).unwrap(), zone, values).unwrap()
}

/// UTC starts of the local hours in `[start, end)`, stepping physical hours
/// and merging repeated local hours into their first occurrence.
pub fn hour_starts(start: i64, end: i64, zone: Tz) -> Vec<i64> {
    let mut out: Vec<i64> = Vec::new();
    let mut last_local = None;
    let mut t = start;
    while t < end {
        let l = zone.timestamp_opt(t, 0).unwrap().naive_local();
        if last_local != Some(l) {
            out.push(t);
        }
        last_local = Some(l);
        t += 3600;
    }
    out
}
