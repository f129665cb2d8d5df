//! Year-long hourly baseline construction.
//!
//! Observed months are compared with a reference profile to get an adjustment
//! factor, unobserved months are filled from the reference, and each month's
//! energy is spread over hours with the household's weekly distribution, either
//! deterministically or by resampling observed slot values.

mod distribution;
mod factor;
mod io;
mod stochastic;
mod synthesis;

use chrono::{Datelike, NaiveDateTime};
use chrono_tz::Tz;
use serde::{Deserialize, Serialize};

use crate::num::Scalar;
use crate::timeseries::{Slot, Timestamp};

pub use distribution::{weekly_distribution, SlotSamplePool, WeeklyDistribution};
pub use factor::{adjustment_factor, fill_monthly, AdjustmentFactor, FactorMode};
pub use io::{read_baseline_csv, write_baseline_csv, CALENDAR_HEADER, PAPER_LITERAL_HEADER};
pub use stochastic::{sample_stochastic, sample_stochastic_traced};
pub use synthesis::synthesize_baseline;

/// Weeks per month in the paper-literal layout.
pub const WEEKS_PER_MONTH: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutMode {
    /// Every month is four identical 168-hour weeks.
    #[default]
    PaperLiteral,
    /// The weekly pattern tiles the real calendar of a given year.
    Calendar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    PaperLiteral,
    Calendar { year: i32, zone: Tz },
}

impl Layout {
    pub fn mode(&self) -> LayoutMode {
        match self {
            Layout::PaperLiteral => LayoutMode::PaperLiteral,
            Layout::Calendar { .. } => LayoutMode::Calendar,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generation {
    Deterministic,
    Stochastic { seed: u64 },
}

/// Where a baseline hour sits: its week-of-month ordinal (0-based), slot, and
/// for calendar layouts the UTC instant the hour starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HourKey {
    pub week: u8,
    pub slot: Slot,
    pub timestamp: Option<Timestamp>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonthBlock<T> {
    pub month: u32,
    pub keys: Vec<HourKey>,
    pub values: Vec<T>,
}

impl<T: Scalar> MonthBlock<T> {
    pub fn sum(&self) -> T {
        self.values.iter().copied().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineYear<T> {
    pub layout: Layout,
    /// `None` when the year was loaded from a file.
    pub generation: Option<Generation>,
    pub months: Vec<MonthBlock<T>>,
}

impl<T: Scalar> BaselineYear<T> {
    pub fn month(&self, m: u32) -> &MonthBlock<T> {
        &self.months[m as usize - 1]
    }

    pub fn hour_count(&self) -> usize {
        self.months.iter().map(|b| b.values.len()).sum()
    }

    /// Baseline value standing in for a local wall-clock hour of any year.
    ///
    /// The hour is matched on month and slot; among the month's hours with
    /// that slot, the n-th is taken where n is the date's weekday occurrence
    /// in its month (clamped to the last available).
    pub fn value_for_local(&self, local: &NaiveDateTime) -> T {
        let block = self.month(local.month());
        let slot = Slot::of_local(local);
        let ordinal = ((local.day() - 1) / 7) as usize;
        let matches: Vec<usize> = block
            .keys
            .iter()
            .enumerate()
            .filter(|(_, k)| k.slot == slot)
            .map(|(i, _)| i)
            .collect();
        let pick = matches[ordinal.min(matches.len() - 1)];
        block.values[pick]
    }
}

/// Total energy of the synthesized year.
pub fn annual_total<T: Scalar>(b: &BaselineYear<T>) -> T {
    b.months.iter().map(MonthBlock::sum).sum()
}
