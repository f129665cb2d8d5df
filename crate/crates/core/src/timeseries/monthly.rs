use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::grid::{month_hours, year_month};
use super::series::HourlySeries;
use crate::error::{Error, Result};
use crate::num::Scalar;

pub const DEFAULT_COMPLETENESS_THRESHOLD: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    Observed,
    Filled,
    Absent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MonthTotal<T> {
    /// 1 = January.
    pub month: u32,
    pub total_kwh: T,
    pub coverage: T,
    pub provenance: Provenance,
}

/// Per-calendar-month energy, January first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", try_from = "RawMonthly<T>")]
pub struct MonthlyTotals<T> {
    months: [MonthTotal<T>; 12],
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar")]
struct RawMonthly<T> {
    months: Vec<MonthTotal<T>>,
}

impl<T: Scalar> TryFrom<RawMonthly<T>> for MonthlyTotals<T> {
    type Error = Error;

    fn try_from(raw: RawMonthly<T>) -> Result<Self> {
        let n = raw.months.len();
        let months: [MonthTotal<T>; 12] = raw.months.try_into().map_err(|_| {
            Error::Schema(format!("expected 12 monthly totals, found {n}"))
        })?;
        MonthlyTotals::new(months)
    }
}

impl<T: Scalar> MonthlyTotals<T> {
    pub fn new(months: [MonthTotal<T>; 12]) -> Result<Self> {
        for (i, m) in months.iter().enumerate() {
            if m.month as usize != i + 1 {
                return Err(Error::Schema(format!(
                    "month entry {} is labelled {}",
                    i + 1,
                    m.month
                )));
            }
            if !m.total_kwh.is_finite() || m.total_kwh < T::zero() {
                return Err(Error::Validation(format!(
                    "month {} total {} must be finite and non-negative",
                    m.month, m.total_kwh
                )));
            }
            if !(m.coverage >= T::zero() && m.coverage <= T::one()) {
                return Err(Error::Validation(format!(
                    "month {} coverage {} outside [0, 1]",
                    m.month, m.coverage
                )));
            }
            if m.coverage == T::zero() && m.provenance == Provenance::Observed {
                return Err(Error::Validation(format!(
                    "month {} has no coverage but is marked observed",
                    m.month
                )));
            }
        }
        Ok(MonthlyTotals { months })
    }

    /// Convenience constructor: `Some(kwh)` months are fully observed, `None` absent.
    pub fn from_observed(values: [Option<T>; 12]) -> Result<Self> {
        let months = std::array::from_fn(|i| match values[i] {
            Some(v) => MonthTotal {
                month: i as u32 + 1,
                total_kwh: v,
                coverage: T::one(),
                provenance: Provenance::Observed,
            },
            None => MonthTotal {
                month: i as u32 + 1,
                total_kwh: T::zero(),
                coverage: T::zero(),
                provenance: Provenance::Absent,
            },
        });
        MonthlyTotals::new(months)
    }

    pub fn months(&self) -> &[MonthTotal<T>; 12] {
        &self.months
    }

    /// Month by 1-based number.
    pub fn month(&self, m: u32) -> &MonthTotal<T> {
        &self.months[m as usize - 1]
    }

    pub fn observed(&self) -> impl Iterator<Item = &MonthTotal<T>> {
        self.months
            .iter()
            .filter(|m| m.provenance == Provenance::Observed)
    }

    pub fn observed_count(&self) -> usize {
        self.observed().count()
    }

    pub fn all_present(&self) -> bool {
        self.months.iter().all(|m| m.provenance != Provenance::Absent)
    }

    pub fn total(&self) -> T {
        self.months.iter().map(|m| m.total_kwh).sum()
    }
}

/// Aggregates a series to calendar months in its zone.
///
/// Coverage is present hours over the month's local calendar hours. Months at or
/// above `completeness_threshold` are `Observed` with totals scaled by
/// `1/coverage`; anything below is `Absent` and keeps its raw partial sum. When
/// a series spans the same month in several years, the month-of-year values are
/// pooled and averaged per occurrence.
pub fn aggregate_to_monthly<T: Scalar>(
    s: &HourlySeries<T>,
    completeness_threshold: T,
) -> Result<MonthlyTotals<T>> {
    if !(completeness_threshold > T::zero() && completeness_threshold <= T::one()) {
        return Err(Error::Config(format!(
            "completeness threshold {completeness_threshold} outside (0, 1]"
        )));
    }
    // (year, month) -> (sum, present hours)
    let mut seen: BTreeMap<(i32, u32), (T, usize)> = BTreeMap::new();
    for (h, v) in s.hours().iter().zip(s.values()) {
        let e = seen.entry(year_month(&h.local)).or_insert((T::zero(), 0));
        if let Some(v) = v {
            e.0 = e.0 + *v;
            e.1 += 1;
        }
    }
    // month-of-year -> (sum, present, calendar hours, occurrences)
    let mut pooled = [(T::zero(), 0usize, 0usize, 0usize); 12];
    for (&(year, month), &(sum, present)) in &seen {
        let p = &mut pooled[month as usize - 1];
        p.0 = p.0 + sum;
        p.1 += present;
        p.2 += month_hours(s.zone(), year, month);
        p.3 += 1;
    }
    let months = std::array::from_fn(|i| {
        let (sum, present, calendar, occurrences) = pooled[i];
        let month = i as u32 + 1;
        if calendar == 0 {
            return MonthTotal {
                month,
                total_kwh: T::zero(),
                coverage: T::zero(),
                provenance: Provenance::Absent,
            };
        }
        let coverage = T::of_usize(present) / T::of_usize(calendar);
        let occ = T::of_usize(occurrences);
        if present > 0 && coverage >= completeness_threshold {
            let total = if present == calendar {
                sum / occ
            } else {
                sum / coverage / occ
            };
            MonthTotal {
                month,
                total_kwh: total,
                coverage,
                provenance: Provenance::Observed,
            }
        } else {
            MonthTotal {
                month,
                total_kwh: sum / occ,
                coverage,
                provenance: Provenance::Absent,
            }
        }
    });
    MonthlyTotals::new(months)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::Timestamp;
    use proptest::prelude::*;

    // 2020-04-01 00:00 UTC
    const APRIL: i64 = 1_585_699_200;

    #[test]
    fn full_april_is_observed() {
        let s = HourlySeries::new(Timestamp::new(APRIL).unwrap(), chrono_tz::UTC, vec![Some(1.0); 720]).unwrap();
        let m = aggregate_to_monthly(&s, 0.95).unwrap();
        let apr = m.month(4);
        assert_eq!(apr.total_kwh, 720.0);
        assert_eq!(apr.coverage, 1.0);
        assert_eq!(apr.provenance, Provenance::Observed);
        assert_eq!(m.month(3).provenance, Provenance::Absent);
        assert_eq!(m.month(3).coverage, 0.0);
    }

    #[test]
    fn half_covered_month_is_absent() {
        let vals = (0..720).map(|i| (i % 2 == 0).then_some(1.0)).collect();
        let s = HourlySeries::new(Timestamp::new(APRIL).unwrap(), chrono_tz::UTC, vals).unwrap();
        let apr = *aggregate_to_monthly(&s, 0.95).unwrap().month(4);
        assert_eq!(apr.coverage, 0.5);
        assert_eq!(apr.provenance, Provenance::Absent);
    }

    #[test]
    fn nearly_complete_month_is_scaled() {
        let mut vals = vec![Some(2.0f64); 720];
        for v in &mut vals[..20] {
            *v = None;
        }
        let s = HourlySeries::new(Timestamp::new(APRIL).unwrap(), chrono_tz::UTC, vals).unwrap();
        let apr = *aggregate_to_monthly(&s, 0.95).unwrap().month(4);
        assert_eq!(apr.provenance, Provenance::Observed);
        assert!((apr.total_kwh - 1440.0).abs() < 1e-9);
    }

    #[test]
    fn threshold_bounds_checked() {
        let s = HourlySeries::new(Timestamp::new(APRIL).unwrap(), chrono_tz::UTC, vec![Some(1.0); 2]).unwrap();
        assert!(aggregate_to_monthly(&s, 0.0).is_err());
        assert!(aggregate_to_monthly(&s, 1.5).is_err());
    }

    #[test]
    fn json_needs_twelve_months() {
        let m = MonthlyTotals::<f64>::from_observed([Some(1.0); 12]).unwrap();
        let mut v: serde_json::Value = serde_json::to_value(&m).unwrap();
        assert_eq!(v["months"][0]["provenance"], "OBSERVED");
        v["months"].as_array_mut().unwrap().pop();
        assert!(serde_json::from_value::<MonthlyTotals<f64>>(v).is_err());
    }

    proptest! {
        #[test]
        fn full_coverage_total_is_plain_sum(vals in proptest::collection::vec(0.0f64..10.0, 720)) {
            let s = HourlySeries::new(Timestamp::new(APRIL).unwrap(), chrono_tz::UTC, vals.iter().map(|v| Some(*v)).collect()).unwrap();
            let apr = *aggregate_to_monthly(&s, 0.95).unwrap().month(4);
            let plain: f64 = vals.iter().sum();
            prop_assert!((apr.total_kwh - plain).abs() <= 1e-9 * plain.max(1.0));
        }
    }
}
