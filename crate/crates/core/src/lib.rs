//! Hourly, year-long household electricity baselines built from a few weeks of
//! meter data plus a monthly reference profile, and temperature-adjusted savings
//! measured against them.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*F64` and
//! `*F32` aliases below name the concrete instantiations.

pub mod baseline;
pub mod config;
pub mod error;
pub mod faultsim;
pub mod ingestion;
pub mod num;
pub mod pipeline;
pub mod reference;
pub mod rng;
pub mod savings;
pub mod timeseries;

pub use baseline::{
    adjustment_factor, annual_total, fill_monthly, sample_stochastic, synthesize_baseline,
    weekly_distribution, AdjustmentFactor, BaselineYear, FactorMode, Generation, Layout, LayoutMode,
    SlotSamplePool, WeeklyDistribution,
};
pub use config::HouseholdConfig;
pub use error::{Error, Result};
pub use faultsim::{FaultPlan, UnplugWindow};
pub use ingestion::{clean_readings, parse_readings_file, parse_weather_file, CleanReport, FileFormat, RawReading};
pub use num::Scalar;
pub use reference::{load_reference_profile, ReferenceProfile};
pub use savings::{adjust_observed, compute_savings, temperature_ratio, ComparisonWindow, SavingsReport};
pub use timeseries::{
    aggregate_to_hourly, aggregate_to_monthly, detect_gaps, slot_of, GapMap, HourlySeries, MeterKind,
    MonthlyTotals, Provenance, Slot, Timestamp, Weekday,
};

pub type HourlySeriesF64 = HourlySeries<f64>;
pub type HourlySeriesF32 = HourlySeries<f32>;
pub type RawReadingF64 = RawReading<f64>;
pub type RawReadingF32 = RawReading<f32>;
pub type MonthlyTotalsF64 = MonthlyTotals<f64>;
pub type MonthlyTotalsF32 = MonthlyTotals<f32>;
pub type ReferenceProfileF64 = ReferenceProfile<f64>;
pub type ReferenceProfileF32 = ReferenceProfile<f32>;
pub type AdjustmentFactorF64 = AdjustmentFactor<f64>;
pub type AdjustmentFactorF32 = AdjustmentFactor<f32>;
pub type WeeklyDistributionF64 = WeeklyDistribution<f64>;
pub type WeeklyDistributionF32 = WeeklyDistribution<f32>;
pub type SlotSamplePoolF64 = SlotSamplePool<f64>;
pub type SlotSamplePoolF32 = SlotSamplePool<f32>;
pub type BaselineYearF64 = BaselineYear<f64>;
pub type BaselineYearF32 = BaselineYear<f32>;
pub type SavingsReportF64 = SavingsReport<f64>;
pub type SavingsReportF32 = SavingsReport<f32>;
