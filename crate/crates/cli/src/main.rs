use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use household_baseline::baseline::{read_baseline_csv, write_baseline_csv};
use household_baseline::faultsim::apply_plan;
use household_baseline::ingestion::{read_series_csv, write_rows_csv, write_series_csv, DEFAULT_SPIKE_THRESHOLD};
use household_baseline::pipeline::{build_baseline, ingest, savings_for_window};
use household_baseline::savings::write_plot_data;
use household_baseline::{
    load_reference_profile, parse_readings_file, parse_weather_file, ComparisonWindow, Error, FaultPlan, FileFormat,
    HouseholdConfig, MeterKind, Timestamp,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(name = "household-baseline", version, about = "Household electricity baselines and savings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Interval,
    Cumulative,
}

impl From<Kind> for MeterKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Interval => MeterKind::Interval,
            Kind::Cumulative => MeterKind::Cumulative,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Clean raw readings into an hourly series.
    Ingest {
        #[arg(long)]
        readings: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        config: PathBuf,
        /// Output directory for series.csv, clean_report.json and gaps.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a year-long hourly baseline from an ingested series.
    BuildBaseline {
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Output directory for monthly_totals.json, weekly_distribution.json and baseline.csv.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        stochastic: bool,
        /// Seed for --stochastic; falls back to the config seed.
        #[arg(long, requires = "stochastic")]
        seed: Option<u64>,
    },
    /// Compute savings over a window against a baseline.
    Savings {
        #[arg(long)]
        baseline: PathBuf,
        #[arg(long)]
        observed: PathBuf,
        #[arg(long)]
        weather_obs: PathBuf,
        #[arg(long)]
        weather_base: PathBuf,
        #[arg(long, num_args = 2, value_names = ["START", "END"])]
        window: Vec<i64>,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "savings_report.json")]
        out: PathBuf,
        #[arg(long)]
        no_temp_adjust: bool,
        #[arg(long)]
        emit_plot_data: Option<PathBuf>,
    },
    /// Inject faults into a series according to a plan.
    Faultsim {
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Household config supplying time zone and spike threshold (UTC and 100 kWh otherwise).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Build baselines for many households.
    BatchBaseline {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Deserialize)]
struct Manifest {
    jobs: Vec<BatchJob>,
}

/// Paths are relative to the manifest's directory.
#[derive(Deserialize)]
struct BatchJob {
    series: PathBuf,
    reference: PathBuf,
    config: PathBuf,
    out: PathBuf,
    /// Present means stochastic generation with this seed.
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Serialize)]
struct BatchResult {
    user_id: String,
    annual_total_kwh: Option<f64>,
    exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InsufficientData(_) | Error::Degenerate(_) | Error::InvalidFactor(_) => 3,
        Error::AdjustmentUndefined(_) => 4,
        _ => 2,
    }
}

fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).expect("artifact serializes");
    fs::write(path, text + "\n").map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn create_dir(path: &Path) -> Result<(), Error> {
    fs::create_dir_all(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn cmd_ingest(readings: &Path, kind: MeterKind, config: &Path, out: &Path) -> Result<String, Error> {
    let cfg = HouseholdConfig::load(config)?;
    let raw = parse_readings_file::<f64>(readings, FileFormat::from_path(readings))?;
    let ing = ingest(&raw, kind, &cfg)?;
    create_dir(out)?;
    write_series_csv(&out.join("series.csv"), &ing.series)?;
    write_json(&out.join("clean_report.json"), &ing.report)?;
    write_json(&out.join("gaps.json"), &ing.gaps)?;
    Ok(serde_json::to_string(&ing.report).expect("report serializes"))
}

fn run_build(series: &Path, reference: &Path, config: &Path, out: &Path, seed: Option<u64>) -> Result<(String, f64), Error> {
    let cfg = HouseholdConfig::load(config)?;
    let zone = cfg.validate()?;
    let series = read_series_csv::<f64>(series, zone)?;
    let reference = load_reference_profile::<f64>(reference)?;
    let built = build_baseline(&series, &reference, &cfg, seed)?;
    create_dir(out)?;
    write_json(&out.join("monthly_totals.json"), &built.months)?;
    write_json(&out.join("weekly_distribution.json"), &built.distribution)?;
    write_baseline_csv(&out.join("baseline.csv"), &built.baseline)?;
    Ok((cfg.user_id, household_baseline::annual_total(&built.baseline)))
}

fn cmd_build_baseline(
    series: &Path,
    reference: &Path,
    config: &Path,
    out: &Path,
    stochastic: bool,
    seed: Option<u64>,
) -> Result<String, Error> {
    let seed = if stochastic {
        let cfg = HouseholdConfig::load(config)?;
        match seed.or(cfg.seed) {
            Some(s) => Some(s),
            None => return Err(Error::Config("--stochastic needs --seed or a seed in the config".into())),
        }
    } else {
        None
    };
    let (_, total) = run_build(series, reference, config, out, seed)?;
    Ok(total.to_string())
}

#[allow(clippy::too_many_arguments)]
fn cmd_savings(
    baseline: &Path,
    observed: &Path,
    weather_obs: &Path,
    weather_base: &Path,
    window: (i64, i64),
    config: &Path,
    out: &Path,
    temp_adjust: bool,
    plot: Option<&Path>,
) -> Result<String, Error> {
    let cfg = HouseholdConfig::load(config)?;
    let zone = cfg.validate()?;
    let window = ComparisonWindow::new(Timestamp::new(window.0)?, Timestamp::new(window.1)?, zone)?;
    let baseline = read_baseline_csv::<f64>(baseline, zone)?;
    let observed = read_series_csv::<f64>(observed, zone)?;
    let w_obs = parse_weather_file::<f64>(weather_obs)?;
    let w_base = parse_weather_file::<f64>(weather_base)?;
    for (path, w) in [(weather_obs, &w_obs), (weather_base, &w_base)] {
        if w.out_of_range > 0 {
            eprintln!("{}: ignored {} out-of-range temperatures", path.display(), w.out_of_range);
        }
    }
    let run = savings_for_window(&baseline, &observed, &w_obs.readings, &w_base.readings, &window, temp_adjust)?;
    write_json(out, &run.report)?;
    if let Some(path) = plot {
        write_plot_data(path, &run.baseline_slice, &run.observed, run.report.temp_ratio)?;
    }
    Ok(run.report.s.to_string())
}

fn cmd_faultsim(series: &Path, plan: &Path, out: &Path, config: Option<&Path>) -> Result<String, Error> {
    let (zone, spike) = match config {
        Some(path) => {
            let cfg = HouseholdConfig::load(path)?;
            (cfg.validate()?, cfg.spike_threshold)
        }
        None => (chrono_tz::UTC, DEFAULT_SPIKE_THRESHOLD),
    };
    let plan = FaultPlan::load(plan)?;
    let series = read_series_csv::<f64>(series, zone)?;
    let (rows, outcome) = apply_plan(&series, &plan, spike)?;
    write_rows_csv(out, &rows)?;
    Ok(format!(
        "{{\"removed\":{},\"corrupted\":{}}}",
        outcome.removed,
        outcome.corrupted.len()
    ))
}

fn cmd_batch(manifest: &Path, jobs: usize) -> Result<String, Error> {
    let text = fs::read_to_string(manifest).map_err(|source| Error::Io { path: manifest.to_path_buf(), source })?;
    let m: Manifest =
        serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", manifest.display())))?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let run = |job: &BatchJob| {
        let out = base.join(&job.out);
        match run_build(&base.join(&job.series), &base.join(&job.reference), &base.join(&job.config), &out, job.seed) {
            Ok((user_id, total)) => BatchResult { user_id, annual_total_kwh: Some(total), exit_code: 0, error: None },
            Err(e) => {
                eprintln!("{}: {e}", out.display());
                BatchResult {
                    user_id: HouseholdConfig::load(&base.join(&job.config)).map(|c| c.user_id).unwrap_or_default(),
                    annual_total_kwh: None,
                    exit_code: exit_code(&e),
                    error: Some(e.to_string()),
                }
            }
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<BatchResult> = pool.install(|| m.jobs.par_iter().map(run).collect());
    Ok(serde_json::to_string(&results).expect("results serialize"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest { readings, kind, config, out } => cmd_ingest(&readings, kind.into(), &config, &out),
        Command::BuildBaseline { series, reference, config, out, stochastic, seed } => {
            cmd_build_baseline(&series, &reference, &config, &out, stochastic, seed)
        }
        Command::Savings {
            baseline,
            observed,
            weather_obs,
            weather_base,
            window,
            config,
            out,
            no_temp_adjust,
            emit_plot_data,
        } => cmd_savings(
            &baseline,
            &observed,
            &weather_obs,
            &weather_base,
            (window[0], window[1]),
            &config,
            &out,
            !no_temp_adjust,
            emit_plot_data.as_deref(),
        ),
        Command::Faultsim { series, plan, out, config } => cmd_faultsim(&series, &plan, &out, config.as_deref()),
        Command::BatchBaseline { manifest, jobs } => cmd_batch(&manifest, jobs),
    };
    match result {
        Ok(line) => {
            println!("{line}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
