use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use aqi_fractal::pipeline::{run_pipeline, RunConfig};
use aqi_fractal_core::preprocess::ImputationPolicy;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "aqi-fractal",
    version,
    about = "Fractal statistics and health-risk reports for daily AQI series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one or more daily AQI CSV files and write reports per city
    Analyze(AnalyzeArgs),
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    /// Input CSV (`date,value` or `index,date,value`); the file stem names the series
    #[arg(long = "input", required = true, value_name = "PATH")]
    inputs: Vec<PathBuf>,

    /// Output directory
    #[arg(long = "out", value_name = "DIR")]
    out: PathBuf,

    /// Histogram bin count [default: Sturges' rule]
    #[arg(long = "bins", value_name = "N")]
    bins: Option<usize>,

    /// Largest per-month gap filled with the month median
    #[arg(long, value_name = "N", default_value_t = ImputationPolicy::DEFAULT_MONTH_GAP_MAX)]
    month_gap_max: u32,

    /// Largest per-year gap filled with the year median
    #[arg(long, value_name = "N", default_value_t = ImputationPolicy::DEFAULT_YEAR_GAP_MAX)]
    year_gap_max: u32,

    /// Reference minimum for every series instead of each series' own minimum
    #[arg(long = "theta", value_name = "X")]
    theta: Option<f64>,

    /// Number of cities processed in parallel
    #[arg(long, value_name = "N", default_value_t = 1)]
    jobs: usize,
}

const EXIT_USAGE: u8 = 2;

fn config_from(args: AnalyzeArgs) -> anyhow::Result<RunConfig> {
    let policy = ImputationPolicy::new(args.month_gap_max, args.year_gap_max)
        .context("invalid --month-gap-max/--year-gap-max")?;
    Ok(RunConfig {
        inputs: args.inputs,
        output_dir: args.out,
        bin_count: args.bins,
        policy,
        theta_override: args.theta,
        jobs: args.jobs,
    })
}

fn main() -> ExitCode {
    let Command::Analyze(args) = Cli::parse().command;
    let config = match config_from(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let summary = match run_pipeline(&config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };

    for city in &summary.cities {
        match &city.result {
            Ok(c) => eprintln!(
                "ok    {}: mean lambda {:.3}, disparity {:.3}",
                c.series_id, c.mean_lambda, c.disparity
            ),
            Err(e) => eprintln!("FAIL  {}: {e}", city.series_id),
        }
    }
    if let Err(e) = &summary.comparison {
        eprintln!("FAIL  comparison: {e}");
    }
    let failed = summary.failures().count();
    eprintln!(
        "{} of {} series analyzed; output in {}",
        summary.cities.len() - failed,
        summary.cities.len(),
        config.output_dir.display()
    );
    ExitCode::from(summary.exit_code() as u8)
}
