use chrono_tz::Tz;
use serde::{Deserialize, Serialize};

use super::grid::{local_hour_of, HourSpan, LocalHours};
use super::{Slot, Timestamp};
use crate::error::{Error, Result};
use crate::ingestion::RawReading;
use crate::num::Scalar;

/// Readings within this many seconds of an hour boundary qualify as the
/// counter value at that boundary.
pub const BOUNDARY_TOLERANCE_SECS: i64 = 300;

/// How a meter reports energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeterKind {
    /// Each reading is the energy consumed since the previous one.
    Interval,
    /// Each reading is a monotone cumulative register value.
    Cumulative,
}

/// Hourly kWh values, `None` marking a missing hour.
#[derive(Debug, Clone, PartialEq)]
pub struct HourlySeries<T> {
    start: Timestamp,
    zone: Tz,
    values: Vec<Option<T>>,
}

impl<T: Scalar> HourlySeries<T> {
    /// `start` must be the first instant of a local hour in `zone`.
    pub fn new(start: Timestamp, zone: Tz, values: Vec<Option<T>>) -> Result<Self> {
        let local = local_hour_of(start.secs(), zone);
        let first = LocalHours::from_local(zone, local).next().unwrap();
        if first.utc_start != start.secs() {
            return Err(Error::Validation(format!(
                "series start {start} is not aligned to a local hour in {}",
                zone.name()
            )));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find_map(|(i, v)| v.filter(|v| !(v.is_finite() && *v >= T::zero())).map(|v| (i, v)))
        {
            return Err(Error::Validation(format!(
                "hour {i} holds {v}; hourly energy must be finite and non-negative"
            )));
        }
        Ok(HourlySeries {
            start,
            zone,
            values,
        })
    }

    pub fn start(&self) -> Timestamp {
        self.start
    }

    pub fn zone(&self) -> Tz {
        self.zone
    }

    pub fn values(&self) -> &[Option<T>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn present_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Local wall-clock extent of every position.
    pub fn hours(&self) -> Vec<HourSpan> {
        LocalHours::from_local(self.zone, local_hour_of(self.start.secs(), self.zone))
            .spans(self.values.len())
    }

    pub fn slots(&self) -> Vec<Slot> {
        self.hours().iter().map(|h| Slot::of_local(&h.local)).collect()
    }

    /// UTC start instant of every position.
    pub fn timestamps(&self) -> Vec<Timestamp> {
        self.hours()
            .iter()
            .map(|h| Timestamp(h.utc_start))
            .collect()
    }

    /// Positions covering `[start, end)`; both bounds must be hour boundaries of this series.
    pub fn window(&self, start: Timestamp, end: Timestamp) -> Result<HourlySeries<T>> {
        if start >= end {
            return Err(Error::Validation(format!(
                "window start {start} is not before end {end}"
            )));
        }
        let hours = self.hours();
        let from = hours
            .iter()
            .position(|h| h.utc_start == start.secs())
            .ok_or_else(|| {
                Error::Validation(format!("window start {start} is not an hour of the series"))
            })?;
        let to = hours
            .iter()
            .position(|h| h.utc_end == end.secs())
            .ok_or_else(|| {
                Error::Validation(format!("window end {end} is not an hour boundary of the series"))
            })?;
        if to < from {
            return Err(Error::Validation("window end precedes start".into()));
        }
        Ok(HourlySeries {
            start,
            zone: self.zone,
            values: self.values[from..=to].to_vec(),
        })
    }

    /// Applies `f` to every present value, keeping missing markers in place.
    pub fn map_present(&self, f: impl Fn(T) -> T) -> Result<HourlySeries<T>> {
        HourlySeries::new(
            self.start,
            self.zone,
            self.values.iter().map(|v| v.map(&f)).collect(),
        )
    }

    pub(crate) fn with_values(&self, values: Vec<Option<T>>) -> HourlySeries<T> {
        debug_assert_eq!(values.len(), self.values.len());
        HourlySeries {
            start: self.start,
            zone: self.zone,
            values,
        }
    }
}

/// A maximal run of missing hours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gap {
    pub start_index: usize,
    pub length_hours: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapMap {
    pub gaps: Vec<Gap>,
}

impl GapMap {
    pub fn missing_hours(&self) -> usize {
        self.gaps.iter().map(|g| g.length_hours).sum()
    }
}

pub fn detect_gaps<T: Scalar>(s: &HourlySeries<T>) -> GapMap {
    let mut gaps = Vec::new();
    let mut run: Option<usize> = None;
    for (i, v) in s.values().iter().enumerate() {
        match (v, run) {
            (None, None) => run = Some(i),
            (Some(_), Some(start)) => {
                gaps.push(Gap {
                    start_index: start,
                    length_hours: i - start,
                });
                run = None;
            }
            _ => {}
        }
    }
    if let Some(start) = run {
        gaps.push(Gap {
            start_index: start,
            length_hours: s.len() - start,
        });
    }
    GapMap { gaps }
}

fn check_sorted<T: Scalar>(readings: &[RawReading<T>]) -> Result<()> {
    if let Some(i) = readings.windows(2).position(|w| w[1].t < w[0].t) {
        return Err(Error::Validation(format!(
            "readings are not sorted by timestamp (index {} at {} follows {})",
            i + 1,
            readings[i + 1].t,
            readings[i].t
        )));
    }
    Ok(())
}

/// Rolls raw readings up to hourly energy, spanning the hours the readings cover.
pub fn aggregate_to_hourly<T: Scalar>(
    readings: &[RawReading<T>],
    kind: MeterKind,
    zone: Tz,
) -> Result<HourlySeries<T>> {
    check_sorted(readings)?;
    let (Some(first), Some(last)) = (readings.first(), readings.last()) else {
        return Err(Error::InsufficientData(
            "no readings to aggregate".to_string(),
        ));
    };
    let (first, last) = (first.t.secs(), last.t.secs());
    let (start, hours) = match kind {
        MeterKind::Interval => {
            let mut n = 0;
            let mut start = None;
            for p in LocalHours::from_local(zone, local_hour_of(first, zone)) {
                if p.utc_start > last {
                    break;
                }
                start.get_or_insert(p.utc_start);
                n += 1;
            }
            (start.unwrap(), n)
        }
        MeterKind::Cumulative => {
            // positions whose two boundaries both lie within the tolerance of the data
            let lo = first - BOUNDARY_TOLERANCE_SECS;
            let hi = last + BOUNDARY_TOLERANCE_SECS;
            let mut it = LocalHours::from_local(zone, local_hour_of(lo, zone))
                .skip_while(|p| p.utc_start < lo);
            let start = it.next().unwrap().utc_start;
            let n = it.take_while(|p| p.utc_start <= hi).count();
            if n == 0 {
                return Err(Error::InsufficientData(
                    "cumulative readings do not span a full hour".to_string(),
                ));
            }
            (start, n)
        }
    };
    aggregate_into(readings, kind, zone, Timestamp(start), hours)
}

/// Rolls raw readings up onto an explicit span of `hours` positions starting at `start`.
/// Readings outside the span are ignored.
pub fn aggregate_into<T: Scalar>(
    readings: &[RawReading<T>],
    kind: MeterKind,
    zone: Tz,
    start: Timestamp,
    hours: usize,
) -> Result<HourlySeries<T>> {
    check_sorted(readings)?;
    let skeleton: HourlySeries<T> = HourlySeries::new(start, zone, vec![None; hours])?;
    let spans = skeleton.hours();
    let values = match kind {
        MeterKind::Interval => interval_sums(readings, &spans)?,
        MeterKind::Cumulative => counter_differences(readings, &spans)?,
    };
    HourlySeries::new(start, zone, values)
}

fn interval_sums<T: Scalar>(readings: &[RawReading<T>], spans: &[HourSpan]) -> Result<Vec<Option<T>>> {
    let mut values = vec![None; spans.len()];
    let mut pos = 0;
    for r in readings {
        if r.value < T::zero() {
            return Err(Error::Validation(format!(
                "negative interval energy {} at {}; clean readings first",
                r.value, r.t
            )));
        }
        let t = r.t.secs();
        while pos < spans.len() && spans[pos].utc_end <= t {
            pos += 1;
        }
        if pos == spans.len() {
            break;
        }
        if spans[pos].utc_start <= t {
            let slot: &mut Option<T> = &mut values[pos];
            *slot = Some(slot.unwrap_or_else(T::zero) + r.value);
        }
    }
    Ok(values)
}

fn counter_at<T: Scalar>(readings: &[RawReading<T>], boundary: i64) -> Option<T> {
    let idx = readings.partition_point(|r| r.t.secs() < boundary);
    let candidates = [idx.checked_sub(1), Some(idx)];
    candidates
        .into_iter()
        .flatten()
        .filter_map(|i| readings.get(i))
        .map(|r| ((r.t.secs() - boundary).abs(), r.value))
        .filter(|(d, _)| *d <= BOUNDARY_TOLERANCE_SECS)
        .min_by_key(|(d, _)| *d)
        .map(|(_, v)| v)
}

fn counter_differences<T: Scalar>(
    readings: &[RawReading<T>],
    spans: &[HourSpan],
) -> Result<Vec<Option<T>>> {
    spans
        .iter()
        .map(|h| {
            let (Some(a), Some(b)) = (
                counter_at(readings, h.utc_start),
                counter_at(readings, h.utc_end),
            ) else {
                return Ok(None);
            };
            if b < a {
                return Err(Error::Validation(format!(
                    "cumulative counter decreases across hour starting {}; clean readings first",
                    h.utc_start
                )));
            }
            Ok(Some(b - a))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::parse_zone;
    use proptest::prelude::*;

    fn r(t: i64, v: f64) -> RawReading<f64> {
        RawReading::new(Timestamp(t), v).unwrap()
    }

    const T0: i64 = 1_591_804_800;

    #[test]
    fn quarter_hour_intervals_sum_to_hour() {
        let rs: Vec<_> = (0..4).map(|i| r(T0 + i * 900, 0.25)).collect();
        let s = aggregate_to_hourly(&rs, MeterKind::Interval, chrono_tz::UTC).unwrap();
        assert_eq!(s.values(), &[Some(1.0)]);
        assert_eq!(s.start().secs(), T0);
    }

    #[test]
    fn counter_difference_over_hour() {
        let rs = vec![r(T0, 100.0), r(T0 + 3600, 101.2)];
        let s = aggregate_to_hourly(&rs, MeterKind::Cumulative, chrono_tz::UTC).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.values()[0].unwrap() - 1.2).abs() < 1e-12);
    }

    #[test]
    fn hour_without_readings_is_missing() {
        let rs = vec![r(T0, 1.0), r(T0 + 2 * 3600, 2.0)];
        let s = aggregate_to_hourly(&rs, MeterKind::Interval, chrono_tz::UTC).unwrap();
        assert_eq!(s.values(), &[Some(1.0), None, Some(2.0)]);
    }

    #[test]
    fn counter_boundary_tolerance() {
        // end boundary reading 4 minutes late qualifies, 6 minutes late does not
        let ok = vec![r(T0 - 120, 10.0), r(T0 + 3600 + 240, 11.0)];
        let s = aggregate_into(&ok, MeterKind::Cumulative, chrono_tz::UTC, Timestamp(T0), 1).unwrap();
        assert_eq!(s.values(), &[Some(1.0)]);
        let late = vec![r(T0, 10.0), r(T0 + 3600 + 360, 11.0)];
        let s = aggregate_into(&late, MeterKind::Cumulative, chrono_tz::UTC, Timestamp(T0), 1).unwrap();
        assert_eq!(s.values(), &[None]);
    }

    #[test]
    fn unsorted_and_negative_rejected() {
        let rs = vec![r(T0 + 10, 1.0), r(T0, 1.0)];
        assert!(matches!(
            aggregate_to_hourly(&rs, MeterKind::Interval, chrono_tz::UTC),
            Err(Error::Validation(_))
        ));
        let rs = vec![r(T0, -1.0)];
        assert!(matches!(
            aggregate_to_hourly(&rs, MeterKind::Interval, chrono_tz::UTC),
            Err(Error::Validation(_))
        ));
        let rs = vec![r(T0, 5.0), r(T0 + 3600, 4.0)];
        assert!(aggregate_to_hourly(&rs, MeterKind::Cumulative, chrono_tz::UTC).is_err());
    }

    #[test]
    fn fall_back_hour_sums_both_physical_hours() {
        let ath = parse_zone("Europe/Athens").unwrap();
        // 2020-10-25 00:00 UTC is the first 03:00 local; 01:00 UTC the repeated one
        let t = 1_603_584_000;
        let rs = vec![r(t, 1.0), r(t + 3600, 2.0), r(t + 7200, 4.0)];
        let s = aggregate_to_hourly(&rs, MeterKind::Interval, ath).unwrap();
        assert_eq!(s.values(), &[Some(3.0), Some(4.0)]);
    }

    #[test]
    fn misaligned_start_rejected() {
        assert!(HourlySeries::<f64>::new(Timestamp(T0 + 60), chrono_tz::UTC, vec![]).is_err());
        // Kolkata hours start on the half hour in UTC
        let kol = parse_zone("Asia/Kolkata").unwrap();
        assert!(HourlySeries::<f64>::new(Timestamp(T0), kol, vec![]).is_err());
        assert!(HourlySeries::<f64>::new(Timestamp(T0 + 1800), kol, vec![]).is_ok());
    }

    #[test]
    fn gap_examples() {
        let mut vals = vec![Some(1.0); 48];
        for v in &mut vals[10..14] {
            *v = None;
        }
        let s = HourlySeries::new(Timestamp(0), chrono_tz::UTC, vals).unwrap();
        assert_eq!(
            detect_gaps(&s).gaps,
            vec![Gap {
                start_index: 10,
                length_hours: 4
            }]
        );
        let full = HourlySeries::new(Timestamp(0), chrono_tz::UTC, vec![Some(1.0); 24]).unwrap();
        assert!(detect_gaps(&full).gaps.is_empty());
        let empty = HourlySeries::<f64>::new(Timestamp(0), chrono_tz::UTC, vec![None; 24]).unwrap();
        assert_eq!(
            detect_gaps(&empty).gaps,
            vec![Gap {
                start_index: 0,
                length_hours: 24
            }]
        );
    }

    #[test]
    fn window_slices_positions() {
        let s = HourlySeries::new(
            Timestamp(0),
            chrono_tz::UTC,
            (0..10).map(|i| Some(i as f64)).collect(),
        )
        .unwrap();
        let w = s.window(Timestamp(3 * 3600), Timestamp(6 * 3600)).unwrap();
        assert_eq!(w.values(), &[Some(3.0), Some(4.0), Some(5.0)]);
        assert!(s.window(Timestamp(3 * 3600), Timestamp(11 * 3600)).is_err());
    }

    proptest! {
        #[test]
        fn gaps_reproduce_missing_mask(mask in proptest::collection::vec(any::<bool>(), 0..200)) {
            let vals: Vec<Option<f64>> = mask.iter().map(|&p| p.then_some(1.0)).collect();
            let s = HourlySeries::new(Timestamp(0), chrono_tz::UTC, vals).unwrap();
            let gaps = detect_gaps(&s);
            let mut rebuilt = vec![true; mask.len()];
            let mut last_end = None;
            for g in &gaps.gaps {
                prop_assert!(g.length_hours >= 1);
                if let Some(e) = last_end { prop_assert!(g.start_index > e); }
                for v in &mut rebuilt[g.start_index..g.start_index + g.length_hours] { *v = false; }
                last_end = Some(g.start_index + g.length_hours);
            }
            prop_assert_eq!(rebuilt, mask);
        }

        #[test]
        fn interval_sum_ignores_order_within_hour(mut vals in proptest::collection::vec(0.0f64..5.0, 1..20), offs in proptest::collection::vec(0i64..3600, 20)) {
            let mk = |vals: &[f64]| {
                let mut rs: Vec<_> = vals.iter().zip(&offs).map(|(v, o)| r(T0 + o, *v)).collect();
                rs.sort_by_key(|r| r.t);
                aggregate_into(&rs, MeterKind::Interval, chrono_tz::UTC, Timestamp(T0), 1).unwrap().values()[0].unwrap()
            };
            let a = mk(&vals);
            vals.reverse();
            let b = mk(&vals);
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }
    }
}
