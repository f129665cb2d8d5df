//! Deterministic injection of field failures into clean hourly series:
//! connectivity dropouts, gateway unplug windows, and storage corruption.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::rng::DrawStream;
use crate::timeseries::{HourlySeries, Timestamp};

/// Mixed into the plan seed for corruption so it does not pick the dropout positions.
pub const CORRUPTION_SEED_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Multiple of the spike threshold written into corrupted "spike" hours.
pub const SPIKE_MULTIPLIER: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnplugWindow {
    pub start: Timestamp,
    pub hours: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultPlan {
    pub seed: u64,
    #[serde(default)]
    pub dropout_rate: f64,
    #[serde(default)]
    pub unplug_windows: Vec<UnplugWindow>,
    #[serde(default)]
    pub corruption_rate: f64,
}

impl FaultPlan {
    pub fn empty() -> Self {
        FaultPlan {
            seed: 0,
            dropout_rate: 0.0,
            unplug_windows: Vec::new(),
            corruption_rate: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_rate(self.dropout_rate, "dropout_rate")?;
        check_rate(self.corruption_rate, "corruption_rate")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let plan: FaultPlan = serde_json::from_str(&text)
            .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
        plan.validate()?;
        Ok(plan)
    }
}

fn check_rate(rate: f64, name: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::Validation(format!("{name} {rate} outside [0, 1]")));
    }
    Ok(())
}

fn chosen(n: usize, rate: f64, seed: u64) -> Vec<usize> {
    let k = ((rate * n as f64).floor() as usize).min(n);
    DrawStream::new(seed).subset(n, k)
}

/// Marks `⌊rate·n⌋` seeded positions of an `n`-hour series missing.
///
/// Positions are drawn over the whole series, so reapplying the same rate and
/// seed selects the same hours.
pub fn inject_dropouts<T: Scalar>(s: &HourlySeries<T>, rate: f64, seed: u64) -> Result<HourlySeries<T>> {
    check_rate(rate, "dropout rate")?;
    let mut values = s.values().to_vec();
    for i in chosen(s.len(), rate, seed) {
        values[i] = None;
    }
    Ok(s.with_values(values))
}

/// Marks a contiguous window of hours missing.
pub fn inject_unplug<T: Scalar>(s: &HourlySeries<T>, window: UnplugWindow) -> Result<HourlySeries<T>> {
    if window.hours == 0 {
        return Ok(s.clone());
    }
    let stamps = s.timestamps();
    let from = stamps.iter().position(|t| *t == window.start).ok_or_else(|| {
        Error::Validation(format!("unplug window start {} is not an hour of the series", window.start))
    })?;
    if from + window.hours > s.len() {
        return Err(Error::Validation(format!(
            "unplug window of {} hours from {} runs past the series end",
            window.hours, window.start
        )));
    }
    let mut values = s.values().to_vec();
    for v in &mut values[from..from + window.hours] {
        *v = None;
    }
    Ok(s.with_values(values))
}

/// Hourly rows (timestamp, value) that may hold invalid energies.
pub type FaultedRows<T> = Vec<(Timestamp, Option<T>)>;

/// Replaces seeded present hours with values the cleaner must reject.
///
/// Corrupted hours alternate, in time order, between `-|v|` and
/// `spike_threshold · 10`; a zero hour always gets the spike so the negative
/// branch never produces `-0`.
pub fn inject_corruption<T: Scalar>(
    s: &HourlySeries<T>,
    rate: f64,
    seed: u64,
    spike_threshold: T,
) -> Result<(FaultedRows<T>, Vec<usize>)> {
    check_rate(rate, "corruption rate")?;
    let spike = spike_threshold * T::of(SPIKE_MULTIPLIER);
    let mut rows: FaultedRows<T> = s.timestamps().into_iter().zip(s.values().iter().copied()).collect();
    let mut corrupted = Vec::new();
    let targets: Vec<usize> = chosen(s.len(), rate, seed)
        .into_iter()
        .filter(|&i| rows[i].1.is_some())
        .collect();
    for (n, i) in targets.into_iter().enumerate() {
        let v = rows[i].1.unwrap();
        let bad = if n % 2 == 0 && v != T::zero() { -v.abs() } else { spike };
        rows[i].1 = Some(bad);
        corrupted.push(i);
    }
    Ok((rows, corrupted))
}

/// What a plan did to a series.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultOutcome {
    /// Present hours turned missing by unplug windows and dropouts.
    pub removed: usize,
    /// Indices of corrupted hours.
    pub corrupted: Vec<usize>,
}

/// Unplug windows, then dropouts, then corruption.
pub fn apply_plan<T: Scalar>(
    s: &HourlySeries<T>,
    plan: &FaultPlan,
    spike_threshold: T,
) -> Result<(FaultedRows<T>, FaultOutcome)> {
    plan.validate()?;
    let mut cur = s.clone();
    for w in &plan.unplug_windows {
        cur = inject_unplug(&cur, *w)?;
    }
    cur = inject_dropouts(&cur, plan.dropout_rate, plan.seed)?;
    let removed = s.present_count() - cur.present_count();
    let (rows, corrupted) = inject_corruption(
        &cur,
        plan.corruption_rate,
        plan.seed ^ CORRUPTION_SEED_SALT,
        spike_threshold,
    )?;
    Ok((rows, FaultOutcome { removed, corrupted }))
}
