use chrono::{Datelike, NaiveDate};

use super::{BaselineYear, Generation, HourKey, Layout, MonthBlock, WeeklyDistribution, WEEKS_PER_MONTH};
use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::timeseries::{LocalHours, MonthlyTotals, Slot, Timestamp};

/// Hour keys of one month block, in draw order (week or day major, hour minor).
pub(super) fn month_keys(layout: &Layout, month: u32) -> Vec<HourKey> {
    match *layout {
        Layout::PaperLiteral => (0..WEEKS_PER_MONTH)
            .flat_map(|w| {
                Slot::all().map(move |slot| HourKey {
                    week: w as u8,
                    slot,
                    timestamp: None,
                })
            })
            .collect(),
        Layout::Calendar { year, zone } => {
            let first = NaiveDate::from_ymd_opt(year, month, 1)
                .expect("valid month")
                .and_hms_opt(0, 0, 0)
                .unwrap();
            LocalHours::from_local(zone, first)
                .take_while(|p| p.local.month() == month && p.local.year() == year)
                .map(|p| HourKey {
                    week: ((p.local.day() - 1) / 7) as u8,
                    slot: Slot::of_local(&p.local),
                    timestamp: Some(Timestamp::new(p.utc_start).expect("calendar years are post-epoch")),
                })
                .collect()
        }
    }
}

pub(super) fn check_months<T: Scalar>(months: &MonthlyTotals<T>) -> Result<()> {
    if let Some(m) = months.months().iter().find(|m| m.provenance == crate::timeseries::Provenance::Absent) {
        return Err(Error::Precondition(format!(
            "month {} is absent; fill monthly totals before synthesis",
            m.month
        )));
    }
    Ok(())
}

pub(super) fn check_layout(layout: &Layout) -> Result<()> {
    if let Layout::Calendar { year, .. } = layout {
        if *year < 1970 || *year > 9999 {
            return Err(Error::Config(format!("calendar year {year} out of range")));
        }
    }
    Ok(())
}

/// Scales `raw` so it sums to `target`. A zero-sum block is spread evenly.
pub(super) fn rescale<T: Scalar>(raw: Vec<T>, target: T) -> Vec<T> {
    if target == T::zero() {
        return vec![T::zero(); raw.len()];
    }
    let sum: T = raw.iter().copied().sum();
    if sum > T::zero() {
        let k = target / sum;
        raw.into_iter().map(|v| v * k).collect()
    } else {
        let each = target / T::of_usize(raw.len());
        vec![each; raw.len()]
    }
}

/// Deterministic hourly baseline from the weekly distribution and monthly totals.
///
/// Paper-literal: each of the month's four weeks carries `share · total / 4`
/// per hour. Calendar: shares tile the month's real hours and are rescaled to
/// the month total.
pub fn synthesize_baseline<T: Scalar>(
    dist: &WeeklyDistribution<T>,
    months: &MonthlyTotals<T>,
    layout: &Layout,
) -> Result<BaselineYear<T>> {
    check_months(months)?;
    check_layout(layout)?;
    let weeks = T::of_usize(WEEKS_PER_MONTH);
    let blocks = months
        .months()
        .iter()
        .map(|m| {
            let keys = month_keys(layout, m.month);
            let values = match layout {
                Layout::PaperLiteral => keys
                    .iter()
                    .map(|k| dist.share(k.slot) * m.total_kwh / weeks)
                    .collect(),
                Layout::Calendar { .. } => {
                    rescale(keys.iter().map(|k| dist.share(k.slot)).collect(), m.total_kwh)
                }
            };
            MonthBlock {
                month: m.month,
                keys,
                values,
            }
        })
        .collect();
    Ok(BaselineYear {
        layout: *layout,
        generation: Some(Generation::Deterministic),
        months: blocks,
    })
}
