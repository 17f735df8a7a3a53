//! Command-line interface: argument definitions and the five subcommands.
//!
//! Every subcommand is a thin orchestration layer over the library modules:
//! parse arguments, resolve the regime configuration, run the pipeline, and
//! write the requested artifacts. All file output is atomic and
//! deterministic, so rerunning a command with the same inputs reproduces
//! the same bytes. Failures map to process exit codes through
//! [`crate::Error::exit_code`]: configuration and input problems exit 2,
//! numerical blow-ups exit 3, degenerate data exits 4.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::config::{builtin_configs, resolve_configs, resolve_single_config, RegimeConfig};
use crate::error::{Error, Result};
use crate::identify::{fit_integrated, fit_legacy, reconstruct_f4, F4Source};
use crate::model::{effective_params, to_dimensionless, ModelState};
use crate::pipeline::assemble_states;
use crate::report::{
    expected_rows, format_expected_table, relative_error, sha256_hex, write_expected_csv,
    write_f4_csv, write_report, write_scan_csv, write_state_csv, DimensionlessReport,
    EstimatedFit, ExpectedBetas, GridReport, Provenance, RelativeErrors, Report,
};
use crate::scan::{choose_shift, detect_slope, scan, ScanGrid, ScanResult, DEFAULT_DROP_FACTOR};
use crate::series::{read_csv, write_atomic, TimeSeries};
use crate::sim::simulate;
use crate::smooth::lowpass_smooth;
use crate::spikes::count_spikes_per_burst;

/// Version string stamped into reports and summaries.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

// ── argument definitions ────────────────────────────────────────────────────

/// Simulation and system identification for a phase-locked loop with a
/// band-pass filter.
#[derive(Debug, Parser)]
#[command(name = "pllid", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the loop equations and write a trajectory CSV.
    Simulate(SimulateArgs),
    /// Print the expected-parameter table for bundled or given regimes.
    Expected(ExpectedArgs),
    /// Fit effective parameters to an observable record and write a report.
    Fit(FitArgs),
    /// Scan the trial shift and write the L and |beta1| curves.
    Scan(ScanArgs),
    /// Count spikes per burst in a record.
    Spikes(SpikesArgs),
}

/// Unit of the input time column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TimeUnit {
    /// Laboratory seconds; times are multiplied by T_renorm internally.
    Lab,
    /// Already dimensionless (e.g. trajectories written by `simulate`).
    Slow,
}

/// Fit family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Increment regression on the integrated identity (recommended).
    Integrated,
    /// Direct regression on the slow equation, using second derivatives.
    Legacy,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Regime: bundled name (1b, 2c, 3d, 4, 5e, 6, Cf) or a config file.
    #[arg(long)]
    pub config: String,
    /// Integration step in dimensionless slow time.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Total number of integration steps.
    #[arg(long, default_value_t = 100_000)]
    pub steps: usize,
    /// Steps to discard from the start; defaults to steps / 5.
    #[arg(long)]
    pub transient: Option<usize>,
    /// Initial state as `phi,y,z`.
    #[arg(long, default_value = "0,0.1,0")]
    pub init: String,
    /// Output trajectory CSV (`t,phi,y,z`).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExpectedArgs {
    /// Regime name, config file, or directory; defaults to the full bundle.
    #[arg(long)]
    pub config: Option<String>,
    /// Also write the table as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Observable record CSV (`t,value` with a header row).
    #[arg(value_name = "SERIES")]
    pub series: PathBuf,
    /// Regime: bundled name or a config file.
    #[arg(long)]
    pub config: String,
    /// Trial shift: a number, or `scan` to choose one from a grid scan.
    /// Required for the integrated method.
    #[arg(long)]
    pub b_trial: Option<String>,
    /// Polynomial drift order K.
    #[arg(long, default_value_t = 1)]
    pub k_order: usize,
    /// Low-pass cutoff in cycles per sample, or `auto` to derive one from
    /// the configured parasite frequency. Omit to skip smoothing.
    #[arg(long)]
    pub cutoff: Option<String>,
    /// Fit family.
    #[arg(long, value_enum, default_value_t = Method::Integrated)]
    pub method: Method,
    /// Small-|eta| exclusion floor for the legacy method.
    #[arg(long)]
    pub y_floor: Option<f64>,
    /// Scan grid lower edge (with --grid-max and --grid-step).
    #[arg(long)]
    pub grid_min: Option<f64>,
    /// Scan grid upper edge.
    #[arg(long)]
    pub grid_max: Option<f64>,
    /// Scan grid spacing.
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Unit of the input time column.
    #[arg(long, value_enum, default_value_t = TimeUnit::Lab)]
    pub time_unit: TimeUnit,
    /// Output report JSON; the function graph goes to `<stem>.f4.csv`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Observable record CSV (`t,value` with a header row).
    #[arg(value_name = "SERIES")]
    pub series: PathBuf,
    /// Regime: bundled name or a config file.
    #[arg(long)]
    pub config: String,
    /// Scan grid lower edge (with --grid-max and --grid-step); when the
    /// three grid flags are omitted the grid is centered on -mean(record)
    /// with a three-sigma half-width.
    #[arg(long)]
    pub grid_min: Option<f64>,
    /// Scan grid upper edge.
    #[arg(long)]
    pub grid_max: Option<f64>,
    /// Scan grid spacing.
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Polynomial drift order K.
    #[arg(long, default_value_t = 1)]
    pub k_order: usize,
    /// Low-pass cutoff in cycles per sample, or `auto`. Omit to skip.
    #[arg(long)]
    pub cutoff: Option<String>,
    /// Unit of the input time column.
    #[arg(long, value_enum, default_value_t = TimeUnit::Lab)]
    pub time_unit: TimeUnit,
    /// Output scan CSV; the summary goes to `<stem>.summary.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpikesArgs {
    /// Record CSV (`t,value` with a header row).
    #[arg(value_name = "SERIES")]
    pub series: PathBuf,
    /// Spike threshold; defaults to the midpoint of the value range.
    #[arg(long)]
    pub spike_threshold: Option<f64>,
    /// Minimum inter-burst gap in time units; defaults to 5x the median
    /// inter-spike interval.
    #[arg(long)]
    pub burst_gap: Option<f64>,
    /// Optional output CSV (`burst,count`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

// ── shared helpers ──────────────────────────────────────────────────────────

/// Prefixes message-carrying errors with the pipeline stage that failed, so
/// a multi-stage command points at the right place.
fn at_stage(stage: &str, err: Error) -> Error {
    match err {
        Error::Invalid(m) => Error::Invalid(format!("{stage}: {m}")),
        Error::Numerical(m) => Error::Numerical(format!("{stage}: {m}")),
        Error::Degenerate(m) => Error::Degenerate(format!("{stage}: {m}")),
        other => other,
    }
}

/// `dir/name.ext` -> `dir/name.suffix` for companion artifacts.
fn sibling_with_suffix(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    out.with_file_name(format!("{stem}.{suffix}"))
}

/// Parses `phi,y,z` into an initial state.
fn parse_init(raw: &str) -> Result<ModelState> {
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Invalid(format!(
            "--init expects `phi,y,z`, got `{raw}`"
        )));
    }
    let mut v = [0.0; 3];
    for (slot, part) in v.iter_mut().zip(&parts) {
        *slot = part.trim().parse::<f64>().map_err(|_| {
            Error::Invalid(format!("--init component `{}` is not a number", part.trim()))
        })?;
    }
    Ok(ModelState::new(v[0], v[1], v[2]))
}

/// Resolves a `--cutoff` value: a literal number, or `auto` for one tenth
/// of the parasite frequency (omega_rg/m + omega_0/n) in cycles per sample.
fn parse_cutoff(
    raw: &str,
    cfg: &RegimeConfig,
    series: &TimeSeries,
    time_unit: TimeUnit,
) -> Result<f64> {
    if raw == "auto" {
        let p = &cfg.physical;
        let parasite_hz = p.omega_rg_hz / f64::from(p.m) + p.omega_0_hz / f64::from(p.n);
        let per_sample = match time_unit {
            TimeUnit::Lab => parasite_hz * series.dt,
            TimeUnit::Slow => {
                let params = to_dimensionless(&p.clone())?;
                parasite_hz / params.t_renorm * series.dt
            }
        };
        let cutoff = per_sample / 10.0;
        if !(cutoff > 0.0 && cutoff < 0.5) {
            return Err(Error::Invalid(format!(
                "auto cutoff {cutoff:.3e} cycles/sample falls outside (0, 0.5); \
                 the record is sampled too coarsely (or too finely) for this \
                 parasite frequency — pass an explicit --cutoff"
            )));
        }
        return Ok(cutoff);
    }
    raw.parse::<f64>()
        .map_err(|_| Error::Invalid(format!("--cutoff must be a number or `auto`, got `{raw}`")))
}

/// Reads the record and applies optional smoothing; returns the series to
/// analyze plus the cutoff actually used.
fn load_record(
    series: &Path,
    cutoff: Option<&str>,
    cfg: &RegimeConfig,
    time_unit: TimeUnit,
) -> Result<(TimeSeries, Option<f64>)> {
    let raw = read_csv(series)?;
    match cutoff {
        None => Ok((raw, None)),
        Some(spec) => {
            let cutoff = parse_cutoff(spec, cfg, &raw, time_unit)?;
            let smoothed = lowpass_smooth(&raw, cutoff).map_err(|e| at_stage("smoothing", e))?;
            Ok((smoothed, Some(cutoff)))
        }
    }
}

fn effective_t_renorm(time_unit: TimeUnit, t_renorm: f64) -> f64 {
    match time_unit {
        TimeUnit::Lab => t_renorm,
        TimeUnit::Slow => 1.0,
    }
}

/// Builds the scan grid from the three grid flags (all or none).
fn grid_from_flags(
    grid_min: Option<f64>,
    grid_max: Option<f64>,
    grid_step: Option<f64>,
    eta: &TimeSeries,
) -> Result<ScanGrid> {
    match (grid_min, grid_max, grid_step) {
        (Some(lo), Some(hi), Some(step)) => ScanGrid::new(lo, hi, step),
        (None, None, None) => ScanGrid::default_for(&eta.values),
        _ => Err(Error::Invalid(
            "--grid-min, --grid-max and --grid-step must be given together".into(),
        )),
    }
}

/// Runs a scan and fills in the slope and choice annotations.
fn run_annotated_scan(
    eta: &TimeSeries,
    grid: &ScanGrid,
    t_renorm: f64,
    k_order: usize,
) -> Result<ScanResult> {
    let mut result =
        scan(eta, grid, t_renorm, k_order).map_err(|e| at_stage("shift scan", e))?;
    result.slope_index = detect_slope(&result, DEFAULT_DROP_FACTOR);
    let outcome = choose_shift(&result);
    result.chosen_index = outcome.chosen_index;
    result.chosen_b = outcome.chosen_b;
    Ok(result)
}

fn median_of(mut values: Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    })
}

// ── scan summary ────────────────────────────────────────────────────────────

/// JSON companion of a scan CSV: grid, outcome, and curve statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub regime: String,
    pub input_file: String,
    pub config_sha256: String,
    pub tool_version: String,
    pub k_order: usize,
    pub b_min: f64,
    pub b_max: f64,
    pub step: f64,
    pub n_points: usize,
    /// Grid points where the per-point fit failed (NaN rows in the CSV).
    pub n_failed: usize,
    /// Grid points where the candidate phase was strictly increasing.
    pub n_monotonic: usize,
    /// Smallest finite L over the grid.
    pub l_min: Option<f64>,
    /// Median finite L over the grid.
    pub l_median: Option<f64>,
    pub slope_index: Option<usize>,
    pub slope_b: Option<f64>,
    pub chosen_index: Option<usize>,
    pub chosen_b: Option<f64>,
}

fn summarize_scan(
    result: &ScanResult,
    grid: &ScanGrid,
    regime: &str,
    input_file: &Path,
    config_sha256: &str,
    k_order: usize,
) -> ScanSummary {
    let finite: Vec<f64> = result
        .l_values
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .collect();
    ScanSummary {
        regime: regime.to_string(),
        input_file: input_file.display().to_string(),
        config_sha256: config_sha256.to_string(),
        tool_version: TOOL_VERSION.to_string(),
        k_order,
        b_min: grid.b_min,
        b_max: grid.b_max,
        step: grid.step,
        n_points: result.b_values.len(),
        n_failed: result.l_values.iter().filter(|v| !v.is_finite()).count(),
        n_monotonic: result.monotonic_flags.iter().filter(|&&m| m).count(),
        l_min: finite.iter().copied().reduce(f64::min),
        l_median: median_of(finite),
        slope_index: result.slope_index,
        slope_b: result.slope_index.map(|i| result.b_values[i]),
        chosen_index: result.chosen_index,
        chosen_b: result.chosen_b,
    }
}

/// Writes a scan summary as pretty-printed JSON (atomic).
pub fn write_scan_summary(path: &Path, summary: &ScanSummary) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summary)
        .map_err(|e| Error::Invalid(format!("cannot serialize scan summary: {e}")))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Reads a scan summary back from JSON.
pub fn read_scan_summary(path: &Path) -> Result<ScanSummary> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Csv {
        file: path.display().to_string(),
        row: None,
        message: format!("invalid scan summary JSON: {e}"),
    })
}

// ── subcommands ─────────────────────────────────────────────────────────────

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let (cfg, _) = resolve_single_config(&args.config)?;
    let params = to_dimensionless(&cfg.physical)?;
    let init = parse_init(&args.init)?;
    let transient = args.transient.unwrap_or(args.steps / 5);
    let (phi, y, z) = simulate(&params, &init, args.dt, args.steps, transient)
        .map_err(|e| at_stage("integration", e))?;
    write_state_csv(&args.out, &phi, &y, &z)?;
    println!(
        "regime {}: {} steps at dt = {}, kept {} samples (transient {}), wrote {}",
        cfg.name,
        args.steps,
        args.dt,
        phi.len(),
        transient,
        args.out.display()
    );
    Ok(())
}

fn cmd_expected(args: &ExpectedArgs) -> Result<()> {
    let configs: Vec<RegimeConfig> = match &args.config {
        Some(spec) => resolve_configs(spec)?.into_iter().map(|(c, _)| c).collect(),
        None => builtin_configs()?,
    };
    let rows = expected_rows(&configs)?;
    print!("{}", format_expected_table(&rows));
    if let Some(out) = &args.out {
        write_expected_csv(out, &rows)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

/// Trial-shift setting parsed from `--b-trial`.
enum BTrial {
    Scan,
    Value(f64),
}

fn parse_b_trial(raw: &str) -> Result<BTrial> {
    if raw == "scan" {
        return Ok(BTrial::Scan);
    }
    raw.parse::<f64>().map(BTrial::Value).map_err(|_| {
        Error::Invalid(format!("--b-trial must be a number or `scan`, got `{raw}`"))
    })
}

fn cmd_fit(args: &FitArgs) -> Result<()> {
    let (cfg, cfg_text) = resolve_single_config(&args.config)?;
    let params = to_dimensionless(&cfg.physical)?;
    let alpha = effective_params(&params);
    let (eta, cutoff) = load_record(&args.series, args.cutoff.as_deref(), &cfg, args.time_unit)?;
    let t_renorm = effective_t_renorm(args.time_unit, params.t_renorm);

    let mut grid_report: Option<GridReport> = None;
    let mut b_trial_label = String::from("none");
    let (fit, chosen_b, method_name, y_floor_used) = match args.method {
        Method::Integrated => {
            if args.y_floor.is_some() {
                return Err(Error::Invalid(
                    "--y-floor applies only to the legacy method".into(),
                ));
            }
            let setting = args.b_trial.as_deref().ok_or_else(|| {
                Error::Invalid("--b-trial is required for the integrated method".into())
            })?;
            b_trial_label = setting.to_string();
            let b_hat = match parse_b_trial(setting)? {
                BTrial::Value(b) => b,
                BTrial::Scan => {
                    let grid =
                        grid_from_flags(args.grid_min, args.grid_max, args.grid_step, &eta)?;
                    let result = run_annotated_scan(&eta, &grid, t_renorm, args.k_order)?;
                    grid_report = Some(GridReport {
                        b_min: grid.b_min,
                        b_max: grid.b_max,
                        step: grid.step,
                        n_points: grid.n_points(),
                    });
                    result.chosen_b.ok_or_else(|| {
                        Error::Degenerate(
                            "shift scan: no acceptable trial shift (no strict interior \
                             minimum of |beta1| before the slope); widen or refine the grid"
                                .into(),
                        )
                    })?
                }
            };
            let ens = assemble_states(&eta, t_renorm, false)
                .map_err(|e| at_stage("state assembly", e))?;
            let fit = fit_integrated(&ens, b_hat, args.k_order)
                .map_err(|e| at_stage("integrated fit", e))?;
            if fit.valid {
                let graph = reconstruct_f4(&ens, b_hat, &fit, F4Source::Pointwise)
                    .map_err(|e| at_stage("function reconstruction", e))?;
                let f4_path = sibling_with_suffix(&args.out, "f4.csv");
                write_f4_csv(&f4_path, &graph)?;
                println!("function graph: {}", f4_path.display());
            }
            (fit, Some(b_hat), "integrated", None)
        }
        Method::Legacy => {
            if args.b_trial.is_some() || args.grid_min.is_some() || args.grid_max.is_some()
                || args.grid_step.is_some()
            {
                return Err(Error::Invalid(
                    "the legacy method does not use a trial shift or scan grid".into(),
                ));
            }
            let ens = assemble_states(&eta, t_renorm, true)
                .map_err(|e| at_stage("state assembly", e))?;
            let peak = ens.eta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let floor = args
                .y_floor
                .unwrap_or(crate::identify::DEFAULT_Y_FLOOR_FRACTION * peak);
            let fit = fit_legacy(&ens, Some(floor)).map_err(|e| at_stage("legacy fit", e))?;
            (fit, None, "legacy", Some(floor))
        }
    };

    // The integrated fit orders coefficients (beta0, beta1, ...); the legacy
    // fit estimates (alpha0, alpha1) directly, so the comparison indices swap.
    let (est_damping, est_drive) = match args.method {
        Method::Integrated => (fit.beta.first().copied(), fit.beta.get(1).copied()),
        Method::Legacy => (fit.beta.get(1).copied(), fit.beta.first().copied()),
    };

    let report = Report {
        regime: cfg.name.clone(),
        dimensionless: DimensionlessReport::from(params),
        expected: ExpectedBetas {
            beta0: alpha.alpha1,
            beta1: alpha.alpha0,
        },
        estimated: EstimatedFit {
            beta: fit.beta.clone(),
            l_value: fit.l_value,
            condition: fit.condition,
            n_points: fit.n_points,
            valid: fit.valid,
            method: method_name.to_string(),
        },
        chosen_b,
        relative_errors: RelativeErrors {
            beta0: est_damping.and_then(|e| relative_error(e, alpha.alpha1)),
            beta1: est_drive.and_then(|e| relative_error(e, alpha.alpha0)),
        },
        provenance: Provenance {
            input_file: args.series.display().to_string(),
            config_source: args.config.clone(),
            config_sha256: sha256_hex(cfg_text.as_bytes()),
            tool_version: TOOL_VERSION.to_string(),
            k_order: args.k_order,
            b_trial: b_trial_label,
            grid: grid_report,
            cutoff,
            y_floor: y_floor_used,
        },
    };
    write_report(&args.out, &report)?;

    println!("regime {} ({}, K = {})", cfg.name, method_name, args.k_order);
    if let Some(b) = chosen_b {
        println!("  shift b = {b:.6e}");
    }
    for (k, b) in fit.beta.iter().enumerate() {
        println!("  beta[{k}] = {b:.6e}");
    }
    println!(
        "  L = {:.6e}, condition = {:.3e}, points = {}",
        fit.l_value, fit.condition, fit.n_points
    );
    if let Some(err) = report.relative_errors.beta0 {
        println!("  damping rel. err. = {err:.3e}");
    }
    if let Some(err) = report.relative_errors.beta1 {
        println!("  drive rel. err.   = {err:.3e}");
    }
    println!("report: {}", args.out.display());

    if !fit.valid {
        return Err(Error::Degenerate(format!(
            "design matrix condition {:.3e} exceeds the trust limit; report written to {}",
            fit.condition,
            args.out.display()
        )));
    }
    Ok(())
}

fn cmd_scan(args: &ScanArgs) -> Result<()> {
    let (cfg, cfg_text) = resolve_single_config(&args.config)?;
    let params = to_dimensionless(&cfg.physical)?;
    let (eta, _cutoff) = load_record(&args.series, args.cutoff.as_deref(), &cfg, args.time_unit)?;
    let t_renorm = effective_t_renorm(args.time_unit, params.t_renorm);
    let grid = grid_from_flags(args.grid_min, args.grid_max, args.grid_step, &eta)?;
    let result = run_annotated_scan(&eta, &grid, t_renorm, args.k_order)?;

    write_scan_csv(&args.out, &result)?;
    let summary = summarize_scan(
        &result,
        &grid,
        &cfg.name,
        &args.series,
        &sha256_hex(cfg_text.as_bytes()),
        args.k_order,
    );
    let summary_path = sibling_with_suffix(&args.out, "summary.json");
    write_scan_summary(&summary_path, &summary)?;

    println!(
        "regime {}: scanned {} shifts in [{:.6e}, {:.6e}], step {:.6e}",
        cfg.name, summary.n_points, grid.b_min, grid.b_max, grid.step
    );
    match summary.slope_b {
        Some(b) => println!("  slope at b = {b:.6e}"),
        None => println!("  no slope detected"),
    }
    match summary.chosen_b {
        Some(b) => println!("  chosen b = {b:.6e}"),
        None => println!("  no shift qualified"),
    }
    println!("scan curve: {}", args.out.display());
    println!("summary:    {}", summary_path.display());
    Ok(())
}

fn cmd_spikes(args: &SpikesArgs) -> Result<()> {
    let series = read_csv(&args.series)?;
    let counts = count_spikes_per_burst(&series, args.spike_threshold, args.burst_gap)?;
    let total: usize = counts.iter().sum();
    println!("bursts: {}", counts.len());
    println!("spikes: {total}");
    if !counts.is_empty() {
        let shown: Vec<String> = counts.iter().take(20).map(|c| c.to_string()).collect();
        let ellipsis = if counts.len() > 20 { " ..." } else { "" };
        println!("per burst: {}{}", shown.join(" "), ellipsis);
    }
    if let Some(out) = &args.out {
        let mut text = String::from("burst,count\n");
        for (i, count) in counts.iter().enumerate() {
            text.push_str(&format!("{},{}\n", i + 1, count));
        }
        write_atomic(out, text.as_bytes())?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

/// Runs one parsed command.
pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Expected(args) => cmd_expected(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Spikes(args) => cmd_spikes(args),
    }
}

// ── tests ───────────────────────────────────────────────────────────────────
