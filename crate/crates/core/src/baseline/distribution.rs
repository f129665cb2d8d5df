use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::timeseries::{HourlySeries, Slot, SLOTS_PER_WEEK};

/// Share of weekly consumption falling in each of the 168 slots, Monday 00:00 first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", try_from = "RawDistribution<T>")]
pub struct WeeklyDistribution<T> {
    shares: Vec<T>,
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar")]
struct RawDistribution<T> {
    shares: Vec<T>,
}

impl<T: Scalar> TryFrom<RawDistribution<T>> for WeeklyDistribution<T> {
    type Error = Error;

    fn try_from(raw: RawDistribution<T>) -> Result<Self> {
        WeeklyDistribution::new(raw.shares)
    }
}

impl<T: Scalar> WeeklyDistribution<T> {
    pub const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(shares: Vec<T>) -> Result<Self> {
        if shares.len() != SLOTS_PER_WEEK {
            return Err(Error::Schema(format!(
                "expected {SLOTS_PER_WEEK} shares, found {}",
                shares.len()
            )));
        }
        if shares.iter().any(|s| !(s.is_finite() && *s >= T::zero())) {
            return Err(Error::Validation("shares must be finite and non-negative".into()));
        }
        let sum: T = shares.iter().copied().sum();
        if (sum - T::one()).abs() > T::of(Self::SUM_TOLERANCE).max(T::epsilon() * T::of(256.0)) {
            return Err(Error::Validation(format!("shares sum to {sum}, not 1")));
        }
        Ok(WeeklyDistribution { shares })
    }

    pub fn uniform() -> Self {
        WeeklyDistribution {
            shares: vec![T::one() / T::of_usize(SLOTS_PER_WEEK); SLOTS_PER_WEEK],
        }
    }

    pub fn shares(&self) -> &[T] {
        &self.shares
    }

    pub fn share(&self, slot: Slot) -> T {
        self.shares[slot.index()]
    }
}

/// Observed hourly values grouped by slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SlotSamplePool<T> {
    slots: Vec<Vec<T>>,
}

impl<T: Scalar> SlotSamplePool<T> {
    pub fn new(slots: Vec<Vec<T>>) -> Result<Self> {
        if slots.len() != SLOTS_PER_WEEK {
            return Err(Error::Schema(format!(
                "expected {SLOTS_PER_WEEK} slot pools, found {}",
                slots.len()
            )));
        }
        if slots.iter().flatten().any(|v| !(v.is_finite() && *v >= T::zero())) {
            return Err(Error::Validation("pool values must be finite and non-negative".into()));
        }
        Ok(SlotSamplePool { slots })
    }

    pub fn slot(&self, slot: Slot) -> &[T] {
        &self.slots[slot.index()]
    }

    pub fn is_empty(&self) -> bool {
        self.slots.iter().all(Vec::is_empty)
    }

    /// The multiset a slot is sampled from: its own values, else the same
    /// hour on the other six days, else every observed value.
    pub fn effective(&self, slot: Slot) -> Vec<T> {
        let own = self.slot(slot);
        if !own.is_empty() {
            return own.to_vec();
        }
        let same_hour: Vec<T> = (0..7)
            .map(|d| d * 24 + slot.hour as usize)
            .filter(|&i| i != slot.index())
            .flat_map(|i| self.slots[i].iter().copied())
            .collect();
        if !same_hour.is_empty() {
            return same_hour;
        }
        self.slots.iter().flatten().copied().collect()
    }
}

/// Per-slot mean across all observed weeks, normalized to shares.
///
/// A slot with no observations takes the mean of the same hour on the other
/// days that have one; failing that, the mean of every present value.
pub fn weekly_distribution<T: Scalar>(
    series: &HourlySeries<T>,
) -> Result<(WeeklyDistribution<T>, SlotSamplePool<T>)> {
    let mut pool: Vec<Vec<T>> = vec![Vec::new(); SLOTS_PER_WEEK];
    for (slot, v) in series.slots().into_iter().zip(series.values()) {
        if let Some(v) = v {
            pool[slot.index()].push(*v);
        }
    }
    let present: usize = pool.iter().map(Vec::len).sum();
    if present == 0 {
        return Err(Error::InsufficientData(
            "weekly distribution needs at least one present hour".to_string(),
        ));
    }
    let mean = |vals: &[T]| vals.iter().copied().sum::<T>() / T::of_usize(vals.len());
    let slot_means: Vec<Option<T>> = pool
        .iter()
        .map(|vals| (!vals.is_empty()).then(|| mean(vals)))
        .collect();
    let global_mean = pool.iter().flatten().copied().sum::<T>() / T::of_usize(present);

    let filled: Vec<T> = Slot::all()
        .map(|slot| {
            slot_means[slot.index()].unwrap_or_else(|| {
                let others: Vec<T> = (0..7)
                    .filter_map(|d| slot_means[d * 24 + slot.hour as usize])
                    .collect();
                if others.is_empty() {
                    global_mean
                } else {
                    mean(&others)
                }
            })
        })
        .collect();

    let total: T = filled.iter().copied().sum();
    if total <= T::zero() {
        return Err(Error::Degenerate(
            "all observed hours are zero; cannot normalize a weekly distribution".to_string(),
        ));
    }
    let shares = filled.into_iter().map(|m| m / total).collect();
    Ok((WeeklyDistribution::new(shares)?, SlotSamplePool::new(pool)?))
}
