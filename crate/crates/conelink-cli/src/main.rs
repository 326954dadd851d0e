//! Command-line front end: run scenarios, solve the connectivity cone,
//! export bit-rate contours, and compare runs.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use conelink::cone::solve_slant_height;
use conelink::sim::run;
use conelink_cli::compare::{compare, render_comparison, sole_run};
use conelink_cli::config::{parse_config, preset, ConfigError, ControllerConfig, RunConfig};
use conelink_cli::export::{
    export_contour, export_metrics, export_timeseries, read_metrics, run_summary, GridSpec,
};

#[derive(Parser)]
#[command(
    name = "conelink",
    about = "Underwater optical link and AUV tracking simulator",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a closed-loop scenario and export its time series and metrics.
    Run(RunArgs),
    /// Solve the cone slant height from the channel model.
    ConeSolve(ConeSolveArgs),
    /// Export a log10 bit-rate grid over (horizontal offset, depth).
    Contour(ContourArgs),
    /// Report improvement percentages between two metrics exports.
    Compare(CompareArgs),
}

#[derive(Args)]
struct ScenarioSource {
    /// Preset name (nominal, case1, case2) or path to a config file.
    #[arg(default_value = "nominal")]
    scenario: String,
    /// Override the controller type of the loaded scenario.
    #[arg(long, value_parser = ["pd", "nlpd"])]
    controller: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: ScenarioSource,
    /// Output directory for the default file names.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Explicit CSV path (defaults to <out-dir>/<name>.csv).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Explicit metrics path (defaults to <out-dir>/<name>.metrics.json).
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Print the resolved canonical config instead of running.
    #[arg(long)]
    print_config: bool,
}

#[derive(Args)]
struct ConeSolveArgs {
    #[command(flatten)]
    source: ScenarioSource,
    /// Override the target bit error rate.
    #[arg(long)]
    target_ber: Option<f64>,
    /// Override the minimum bit rate, bit/s.
    #[arg(long)]
    min_bit_rate: Option<f64>,
}

#[derive(Args)]
struct ContourArgs {
    #[command(flatten)]
    source: ScenarioSource,
    /// Output path of the grid.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = -5.0)]
    offset_min: f64,
    #[arg(long, default_value_t = 5.0)]
    offset_max: f64,
    #[arg(long, default_value_t = 0.0)]
    depth_min: f64,
    #[arg(long, default_value_t = 8.0)]
    depth_max: f64,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
}

#[derive(Args)]
struct CompareArgs {
    /// Baseline metrics JSON (for instance, the PD run).
    baseline: PathBuf,
    /// Candidate metrics JSON (for instance, the NLPD run).
    candidate: PathBuf,
    /// Optional JSON output path for the comparison.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_config(source: &ScenarioSource) -> Result<RunConfig, ConfigError> {
    let base = if Path::new(&source.scenario).exists() {
        let text = std::fs::read_to_string(&source.scenario).map_err(|e| {
            ConfigError::Validation(format!("cannot read {}: {e}", source.scenario))
        })?;
        parse_config(&text)?
    } else {
        preset(&source.scenario)?
    };
    Ok(match source.controller.as_deref() {
        Some("nlpd") => base.with_controller(ControllerConfig::nlpd(), "nlpd"),
        Some("pd") => base.with_controller(ControllerConfig::pd(), "pd"),
        _ => base,
    })
}

fn run_command(args: &RunArgs) -> Result<(), CliError> {
    let config = load_config(&args.source)?;
    if args.print_config {
        print!("{}", config.serialize()?);
        return Ok(());
    }
    let scenario = config.build_scenario()?;
    let record = run(&scenario)?;
    let csv_path = args
        .csv
        .clone()
        .unwrap_or_else(|| args.out_dir.join(format!("{}.csv", config.name)));
    let metrics_path = args
        .metrics
        .clone()
        .unwrap_or_else(|| args.out_dir.join(format!("{}.metrics.json", config.name)));
    export_timeseries(&record, &csv_path)
        .map_err(|e| ConfigError::Validation(format!("cannot write {}: {e}", csv_path.display())))?;
    let summary = run_summary(&config, &record)?;
    export_metrics(std::slice::from_ref(&summary), &metrics_path).map_err(|e| {
        ConfigError::Validation(format!("cannot write {}: {e}", metrics_path.display()))
    })?;
    let m = &record.metrics;
    println!(
        "{}: rows={} t_a={} t_b={} restoring={} rmse=({}, {}, {})",
        config.name,
        record.rows.len(),
        fmt_opt(m.cone_arrival_time, "s"),
        fmt_opt(m.established_time, "s"),
        fmt_opt(m.restoring_time, "s"),
        fmt_opt(m.rmse_x, "m"),
        fmt_opt(m.rmse_y, "m"),
        fmt_opt(m.rmse_rho, "rad"),
    );
    println!("wrote {} and {}", csv_path.display(), metrics_path.display());
    Ok(())
}

fn cone_solve_command(args: &ConeSolveArgs) -> Result<(), CliError> {
    let config = load_config(&args.source)?;
    let target_ber = args.target_ber.unwrap_or(config.cone.target_ber);
    let min_bit_rate = args.min_bit_rate.unwrap_or(config.cone.min_bit_rate);
    let slant = solve_slant_height(&config.optics, target_ber, min_bit_rate)?;
    let height = slant * config.optics.receiver.fov_half_angle.cos();
    println!(
        "slant_height = {slant:.6} m, height = {height:.6} m \
         (target_ber = {target_ber}, min_bit_rate = {min_bit_rate} bit/s)"
    );
    Ok(())
}

fn contour_command(args: &ContourArgs) -> Result<(), CliError> {
    let config = load_config(&args.source)?;
    let grid = GridSpec {
        offset_min: args.offset_min,
        offset_max: args.offset_max,
        depth_min: args.depth_min,
        depth_max: args.depth_max,
        step: args.step,
    };
    export_contour(&config.optics, &grid, config.cone.target_ber, &args.out)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn compare_command(args: &CompareArgs) -> Result<(), CliError> {
    let baseline_doc = read_metrics(&args.baseline)?;
    let candidate_doc = read_metrics(&args.candidate)?;
    let baseline = sole_run(&baseline_doc, &args.baseline.display().to_string())?;
    let candidate = sole_run(&candidate_doc, &args.candidate.display().to_string())?;
    let comparison = compare(&baseline, &candidate);
    print!("{}", render_comparison(&comparison));
    if let Some(out) = &args.out {
        let mut text = serde_json::to_string_pretty(&comparison)
            .map_err(|e| ConfigError::Validation(format!("comparison serialize: {e}")))?;
        text.push('\n');
        std::fs::write(out, text).map_err(|e| {
            ConfigError::Validation(format!("cannot write {}: {e}", out.display()))
        })?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn fmt_opt(value: Option<f64>, unit: &str) -> String {
    value.map_or_else(|| "--".into(), |v| format!("{v:.4} {unit}"))
}

enum CliError {
    Config(ConfigError),
    Sim(conelink::Error),
}

impl From<ConfigError> for CliError {
    fn from(err: ConfigError) -> Self {
        CliError::Config(err)
    }
}

impl From<conelink::Error> for CliError {
    fn from(err: conelink::Error) -> Self {
        CliError::Sim(err)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run_command(args),
        Command::ConeSolve(args) => cone_solve_command(args),
        Command::Contour(args) => contour_command(args),
        Command::Compare(args) => compare_command(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Sim(err @ conelink::Error::Divergence { .. })) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
        Err(CliError::Sim(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
        Err(CliError::Config(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
