//! Calendar-aware hourly time series.
//!
//! Storage is always UTC epoch seconds. Hour boundaries, weekdays and month
//! boundaries are evaluated in the household's IANA zone. A series position is
//! one *existing local wall-clock hour*: the hour skipped at spring-forward has
//! no position, and the repeated hour at fall-back is a single position spanning
//! two physical hours.

mod grid;
mod monthly;
mod series;

use std::fmt;

use chrono::{Datelike, TimeZone, Timelike};
use chrono_tz::Tz;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use grid::HourSpan;
pub(crate) use grid::LocalHours;
pub use grid::local_hour_of;
pub use monthly::{
    aggregate_to_monthly, MonthTotal, MonthlyTotals, Provenance, DEFAULT_COMPLETENESS_THRESHOLD,
};
pub use series::{
    aggregate_into, aggregate_to_hourly, detect_gaps, Gap, GapMap, HourlySeries, MeterKind,
};

pub const SECONDS_PER_HOUR: i64 = 3600;
pub const SECONDS_PER_WEEK: i64 = 7 * 86_400;
pub const SLOTS_PER_WEEK: usize = 168;

/// Seconds since the Unix epoch, UTC. Never negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct Timestamp(i64);

impl Timestamp {
    pub fn new(epoch_seconds: i64) -> Result<Self> {
        if epoch_seconds < 0 {
            return Err(Error::Validation(format!(
                "timestamp {epoch_seconds} precedes the Unix epoch"
            )));
        }
        Ok(Timestamp(epoch_seconds))
    }

    pub fn secs(self) -> i64 {
        self.0
    }
}

impl TryFrom<i64> for Timestamp {
    type Error = Error;

    fn try_from(v: i64) -> Result<Self> {
        Timestamp::new(v)
    }
}

impl From<Timestamp> for i64 {
    fn from(t: Timestamp) -> i64 {
        t.0
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Day of the week, Monday first as in the weekly consumption vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Weekday {
    Mon,
    Tue,
    Wed,
    Thu,
    Fri,
    Sat,
    Sun,
}

impl Weekday {
    pub const ALL: [Weekday; 7] = [
        Weekday::Mon,
        Weekday::Tue,
        Weekday::Wed,
        Weekday::Thu,
        Weekday::Fri,
        Weekday::Sat,
        Weekday::Sun,
    ];

    /// 0 for Monday through 6 for Sunday.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Weekday> {
        Weekday::ALL.get(i).copied()
    }
}

impl From<chrono::Weekday> for Weekday {
    fn from(d: chrono::Weekday) -> Self {
        Weekday::ALL[d.num_days_from_monday() as usize]
    }
}

/// A (day-of-week, hour) cell of the 168-slot week.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub day: Weekday,
    pub hour: u8,
}

impl Slot {
    pub fn new(day: Weekday, hour: u8) -> Result<Slot> {
        if hour > 23 {
            return Err(Error::Validation(format!("slot hour {hour} outside 0..=23")));
        }
        Ok(Slot { day, hour })
    }

    /// Position in the Monday-00 first weekly vector, 0..168.
    pub fn index(self) -> usize {
        self.day.index() * 24 + self.hour as usize
    }

    pub fn from_index(i: usize) -> Option<Slot> {
        if i >= SLOTS_PER_WEEK {
            return None;
        }
        Some(Slot {
            day: Weekday::ALL[i / 24],
            hour: (i % 24) as u8,
        })
    }

    pub fn all() -> impl Iterator<Item = Slot> {
        (0..SLOTS_PER_WEEK).filter_map(Slot::from_index)
    }

    pub(crate) fn of_local(local: &chrono::NaiveDateTime) -> Slot {
        Slot {
            day: local.weekday().into(),
            hour: local.hour() as u8,
        }
    }
}

/// Resolves an IANA zone name.
pub fn parse_zone(name: &str) -> Result<Tz> {
    name.parse::<Tz>()
        .map_err(|_| Error::Config(format!("unknown time zone `{name}`")))
}

/// Local day-of-week and hour of `t` in the named zone.
pub fn slot_of(t: Timestamp, zone: &str) -> Result<Slot> {
    Ok(slot_in(t, parse_zone(zone)?))
}

pub fn slot_in(t: Timestamp, zone: Tz) -> Slot {
    let local = zone.timestamp_opt(t.secs(), 0).unwrap().naive_local();
    Slot::of_local(&local)
}
