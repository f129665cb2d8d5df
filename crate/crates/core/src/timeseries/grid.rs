use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, TimeZone, Timelike};
use chrono_tz::Tz;

/// One existing local hour and its physical extent `[utc_start, utc_end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HourSpan {
    pub local: NaiveDateTime,
    pub utc_start: i64,
    pub utc_end: i64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct HourPos {
    pub local: NaiveDateTime,
    pub utc_start: i64,
}

/// Endless iterator over the existing local hours of a zone, starting at a
/// local naive hour. Nonexistent hours are skipped; repeated hours resolve to
/// their earliest instant.
pub(crate) struct LocalHours {
    zone: Tz,
    next: NaiveDateTime,
}

impl LocalHours {
    pub fn from_local(zone: Tz, local_hour: NaiveDateTime) -> Self {
        LocalHours {
            zone,
            next: local_hour,
        }
    }

    /// Yields spans (with `utc_end`) for the next `n` positions.
    pub fn spans(mut self, n: usize) -> Vec<HourSpan> {
        let mut out = Vec::with_capacity(n);
        let Some(mut cur) = self.next() else {
            return out;
        };
        for _ in 0..n {
            let nxt = self.next().expect("local hours never run out");
            out.push(HourSpan {
                local: cur.local,
                utc_start: cur.utc_start,
                utc_end: nxt.utc_start,
            });
            cur = nxt;
        }
        out
    }
}

impl Iterator for LocalHours {
    type Item = HourPos;

    fn next(&mut self) -> Option<HourPos> {
        loop {
            let h = self.next;
            self.next = h + Duration::hours(1);
            if let Some(dt) = self.zone.from_local_datetime(&h).earliest() {
                return Some(HourPos {
                    local: h,
                    utc_start: dt.timestamp(),
                });
            }
        }
    }
}

/// Local wall-clock hour (truncated) containing the instant `t`.
pub fn local_hour_of(t: i64, zone: Tz) -> NaiveDateTime {
    let local = zone.timestamp_opt(t, 0).unwrap().naive_local();
    local
        .with_minute(0)
        .and_then(|l| l.with_second(0))
        .expect("zeroing minutes is always valid")
}

/// Number of existing local hours in a calendar month.
pub(crate) fn month_hours(zone: Tz, year: i32, month: u32) -> usize {
    let first = NaiveDate::from_ymd_opt(year, month, 1)
        .expect("valid month")
        .and_hms_opt(0, 0, 0)
        .unwrap();
    let next = if month == 12 {
        NaiveDate::from_ymd_opt(year + 1, 1, 1)
    } else {
        NaiveDate::from_ymd_opt(year, month + 1, 1)
    }
    .unwrap()
    .and_hms_opt(0, 0, 0)
    .unwrap();
    LocalHours::from_local(zone, first)
        .take_while(|p| p.local < next)
        .count()
}

pub(crate) fn year_month(local: &NaiveDateTime) -> (i32, u32) {
    (local.year(), local.month())
}
