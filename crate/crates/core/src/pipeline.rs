//! End-to-end orchestration: readings to series, series to baseline, baseline
//! to savings. The CLI is a thin shell over these functions.

use chrono::Datelike;

use crate::baseline::{
    adjustment_factor, fill_monthly, sample_stochastic, synthesize_baseline, weekly_distribution,
    AdjustmentFactor, BaselineYear, Layout, LayoutMode, SlotSamplePool, WeeklyDistribution,
};
use crate::config::HouseholdConfig;
use crate::error::Result;
use crate::ingestion::{clean_readings, CleanReport, RawReading};
use crate::num::Scalar;
use crate::reference::ReferenceProfile;
use crate::savings::{compute_savings_with, ComparisonWindow, SavingsReport, TemperatureAdjustment};
use crate::timeseries::{
    aggregate_to_hourly, aggregate_to_monthly, detect_gaps, local_hour_of, GapMap, HourlySeries,
    MeterKind, MonthlyTotals,
};

#[derive(Debug, Clone)]
pub struct Ingested<T> {
    pub series: HourlySeries<T>,
    pub report: CleanReport,
    pub gaps: GapMap,
}

pub fn ingest<T: Scalar>(readings: &[RawReading<T>], kind: MeterKind, cfg: &HouseholdConfig) -> Result<Ingested<T>> {
    let zone = cfg.validate()?;
    let (clean, report) = clean_readings(readings, kind, T::of(cfg.spike_threshold));
    let series = aggregate_to_hourly(&clean, kind, zone)?;
    let gaps = detect_gaps(&series);
    Ok(Ingested { series, report, gaps })
}

#[derive(Debug, Clone)]
pub struct BaselineArtifacts<T> {
    /// Monthly totals as measured, before filling.
    pub measured: MonthlyTotals<T>,
    pub factor: AdjustmentFactor<T>,
    /// All twelve months, observed or filled.
    pub months: MonthlyTotals<T>,
    pub distribution: WeeklyDistribution<T>,
    pub pool: SlotSamplePool<T>,
    pub baseline: BaselineYear<T>,
}

/// Layout implied by the config; calendar baselines use the year the series starts in.
pub fn layout_for<T: Scalar>(cfg: &HouseholdConfig, series: &HourlySeries<T>) -> Layout {
    match cfg.layout_mode {
        LayoutMode::PaperLiteral => Layout::PaperLiteral,
        LayoutMode::Calendar => Layout::Calendar {
            year: local_hour_of(series.start().secs(), series.zone()).year(),
            zone: series.zone(),
        },
    }
}

pub fn build_baseline<T: Scalar>(
    series: &HourlySeries<T>,
    reference: &ReferenceProfile<T>,
    cfg: &HouseholdConfig,
    stochastic_seed: Option<u64>,
) -> Result<BaselineArtifacts<T>> {
    cfg.validate()?;
    let measured = aggregate_to_monthly(series, T::of(cfg.completeness_threshold))?;
    let factor = adjustment_factor(&measured, reference, cfg.factor_mode)?;
    let months = fill_monthly(&measured, reference, &factor)?;
    let (distribution, pool) = weekly_distribution(series)?;
    let layout = layout_for(cfg, series);
    let baseline = match stochastic_seed {
        Some(seed) => sample_stochastic(&pool, &months, &layout, seed)?,
        None => synthesize_baseline(&distribution, &months, &layout)?,
    };
    Ok(BaselineArtifacts {
        measured,
        factor,
        months,
        distribution,
        pool,
        baseline,
    })
}

#[derive(Debug, Clone)]
pub struct SavingsRun<T> {
    pub report: SavingsReport<T>,
    pub baseline_slice: Vec<T>,
    pub observed: HourlySeries<T>,
}

/// Compares the observed series with the baseline over `window`.
///
/// Observed temperatures are the weather readings inside the window; baseline
/// temperatures are readings on the same local dates and hours in any year.
pub fn savings_for_window<T: Scalar>(
    baseline: &BaselineYear<T>,
    observed: &HourlySeries<T>,
    weather_obs: &[RawReading<T>],
    weather_base: &[RawReading<T>],
    window: &ComparisonWindow,
    temperature_adjust: bool,
) -> Result<SavingsRun<T>> {
    let observed = observed.window(window.start(), window.end())?;
    let baseline_slice = window.baseline_slice(baseline);
    let obs_temps = window.readings_within(weather_obs);
    let base_temps = window.readings_same_dates(weather_base);
    let adjustment = if temperature_adjust {
        TemperatureAdjustment::Ratio {
            observed: &obs_temps,
            baseline: &base_temps,
        }
    } else {
        TemperatureAdjustment::Disabled
    };
    let report = compute_savings_with(&baseline_slice, &observed, adjustment, window)?;
    Ok(SavingsRun {
        report,
        baseline_slice,
        observed,
    })
}
