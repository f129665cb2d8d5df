//! Savings against the baseline: `S = E_b - E_pr`, where the observed energy is
//! first scaled by the ratio of observed to baseline mean temperature.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::{Datelike, Timelike};
use chrono_tz::Tz;
use serde::{Deserialize, Serialize};

use crate::baseline::BaselineYear;
use crate::error::{Error, Result};
use crate::ingestion::RawReading;
use crate::num::Scalar;
use crate::timeseries::{local_hour_of, HourSpan, HourlySeries, LocalHours, Timestamp};

/// Baseline mean temperatures at or below this (°C) make the ratio undefined.
pub const MIN_BASE_MEAN_C: f64 = 0.5;

pub const PLOT_HEADER: &str = "timestamp,baseline,observed,adjusted";

/// Hour-aligned comparison period `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonWindow {
    start: Timestamp,
    end: Timestamp,
    zone: Tz,
}

impl ComparisonWindow {
    pub fn new(start: Timestamp, end: Timestamp, zone: Tz) -> Result<Self> {
        if start >= end {
            return Err(Error::Validation(format!(
                "window start {start} must precede end {end}"
            )));
        }
        for t in [start, end] {
            let first = LocalHours::from_local(zone, local_hour_of(t.secs(), zone))
                .next()
                .unwrap();
            if first.utc_start != t.secs() {
                return Err(Error::Validation(format!(
                    "window bound {t} is not a local hour boundary in {}",
                    zone.name()
                )));
            }
        }
        Ok(ComparisonWindow { start, end, zone })
    }

    pub fn start(&self) -> Timestamp {
        self.start
    }

    pub fn end(&self) -> Timestamp {
        self.end
    }

    pub fn zone(&self) -> Tz {
        self.zone
    }

    pub fn hours(&self) -> Vec<HourSpan> {
        let n = LocalHours::from_local(self.zone, local_hour_of(self.start.secs(), self.zone))
            .take_while(|p| p.utc_start < self.end.secs())
            .count();
        LocalHours::from_local(self.zone, local_hour_of(self.start.secs(), self.zone)).spans(n)
    }

    /// Baseline values for each window hour.
    pub fn baseline_slice<T: Scalar>(&self, b: &BaselineYear<T>) -> Vec<T> {
        self.hours()
            .iter()
            .map(|h| b.value_for_local(&h.local))
            .collect()
    }

    /// Readings whose instant falls inside the window.
    pub fn readings_within<T: Scalar>(&self, rs: &[RawReading<T>]) -> Vec<T> {
        rs.iter()
            .filter(|r| r.t >= self.start && r.t < self.end)
            .map(|r| r.value)
            .collect()
    }

    /// Readings from any year whose local month, day and hour match a window hour.
    pub fn readings_same_dates<T: Scalar>(&self, rs: &[RawReading<T>]) -> Vec<T> {
        let keys: HashSet<(u32, u32, u32)> = self
            .hours()
            .iter()
            .map(|h| (h.local.month(), h.local.day(), h.local.hour()))
            .collect();
        rs.iter()
            .filter(|r| {
                let l = local_hour_of(r.t.secs(), self.zone);
                keys.contains(&(l.month(), l.day(), l.hour()))
            })
            .map(|r| r.value)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SavingsReport<T> {
    #[serde(rename = "E_b")]
    pub e_b: T,
    #[serde(rename = "E_pr_raw")]
    pub e_pr_raw: T,
    #[serde(rename = "E_pr")]
    pub e_pr: T,
    #[serde(rename = "A")]
    pub a: T,
    #[serde(rename = "S")]
    pub s: T,
    pub temp_ratio: T,
    #[serde(rename = "T_obs_mean")]
    pub t_obs_mean: Option<T>,
    #[serde(rename = "T_base_mean")]
    pub t_base_mean: Option<T>,
    pub window_start: Timestamp,
    pub window_end: Timestamp,
}

fn mean<T: Scalar>(xs: &[T], what: &str) -> Result<T> {
    if xs.is_empty() {
        return Err(Error::InsufficientData(format!("no {what} temperatures")));
    }
    Ok(xs.iter().copied().sum::<T>() / T::of_usize(xs.len()))
}

/// Ratio of mean observed temperature to mean baseline temperature (°C).
pub fn temperature_ratio<T: Scalar>(obs_temps: &[T], base_temps: &[T]) -> Result<T> {
    let obs = mean(obs_temps, "observed")?;
    let base = mean(base_temps, "baseline")?;
    if base <= T::of(MIN_BASE_MEAN_C) {
        return Err(Error::AdjustmentUndefined(format!(
            "baseline mean temperature {base} °C is at or below {MIN_BASE_MEAN_C} °C"
        )));
    }
    Ok(obs / base)
}

/// Scales every present hour by `ratio`.
pub fn adjust_observed<T: Scalar>(observed: &HourlySeries<T>, ratio: T) -> Result<HourlySeries<T>> {
    if !(ratio.is_finite() && ratio > T::zero()) {
        return Err(Error::Validation(format!(
            "adjustment ratio must be positive, got {ratio}"
        )));
    }
    observed.map_present(|v| v * ratio)
}

/// How observed consumption is brought to baseline conditions.
#[derive(Debug, Clone, Copy)]
pub enum TemperatureAdjustment<'a, T> {
    Ratio { observed: &'a [T], baseline: &'a [T] },
    Disabled,
}

/// Savings with temperature adjustment.
pub fn compute_savings<T: Scalar>(
    baseline_slice: &[T],
    observed: &HourlySeries<T>,
    obs_temps: &[T],
    base_temps: &[T],
    window: &ComparisonWindow,
) -> Result<SavingsReport<T>> {
    compute_savings_with(
        baseline_slice,
        observed,
        TemperatureAdjustment::Ratio {
            observed: obs_temps,
            baseline: base_temps,
        },
        window,
    )
}

/// Sums baseline and observed energy over the window hours where the observed
/// value is present; missing observed hours are excluded from both sums.
pub fn compute_savings_with<T: Scalar>(
    baseline_slice: &[T],
    observed: &HourlySeries<T>,
    adjustment: TemperatureAdjustment<'_, T>,
    window: &ComparisonWindow,
) -> Result<SavingsReport<T>> {
    let hours = window.hours().len();
    if observed.start() != window.start || observed.len() != hours || baseline_slice.len() != hours {
        return Err(Error::Precondition(format!(
            "window has {hours} hours from {}; observed has {} from {}, baseline slice {}",
            window.start,
            observed.len(),
            observed.start(),
            baseline_slice.len()
        )));
    }
    if baseline_slice.iter().any(|b| !(b.is_finite() && *b >= T::zero())) {
        return Err(Error::Validation("baseline values must be finite and non-negative".into()));
    }
    let (ratio, t_obs_mean, t_base_mean) = match adjustment {
        TemperatureAdjustment::Ratio { observed, baseline } => (
            temperature_ratio(observed, baseline)?,
            Some(mean(observed, "observed")?),
            Some(mean(baseline, "baseline")?),
        ),
        TemperatureAdjustment::Disabled => (T::one(), None, None),
    };
    let adjusted = adjust_observed(observed, ratio)?;

    let mut paired = 0usize;
    let (mut e_b, mut e_pr_raw, mut e_pr) = (T::zero(), T::zero(), T::zero());
    for ((b, raw), adj) in baseline_slice.iter().zip(observed.values()).zip(adjusted.values()) {
        if let (Some(raw), Some(adj)) = (raw, adj) {
            paired += 1;
            e_b = e_b + *b;
            e_pr_raw = e_pr_raw + *raw;
            e_pr = e_pr + *adj;
        }
    }
    if paired == 0 {
        return Err(Error::InsufficientData(
            "no observed hours inside the comparison window".to_string(),
        ));
    }
    Ok(SavingsReport {
        e_b,
        e_pr_raw,
        e_pr,
        a: e_pr - e_pr_raw,
        s: e_b - e_pr,
        temp_ratio: ratio,
        t_obs_mean,
        t_base_mean,
        window_start: window.start,
        window_end: window.end,
    })
}

/// Writes `timestamp,baseline,observed,adjusted` rows for external plotting.
pub fn write_plot_data<T: Scalar>(
    path: &Path,
    baseline_slice: &[T],
    observed: &HourlySeries<T>,
    ratio: T,
) -> Result<()> {
    let adjusted = adjust_observed(observed, ratio)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(w, "{PLOT_HEADER}").map_err(io)?;
    let cell = |v: &Option<T>| v.map(|v| v.to_string()).unwrap_or_default();
    for (((t, b), o), a) in observed
        .timestamps()
        .iter()
        .zip(baseline_slice)
        .zip(observed.values())
        .zip(adjusted.values())
    {
        writeln!(w, "{t},{b},{},{}", cell(o), cell(a)).map_err(io)?;
    }
    w.flush().map_err(io)
}
