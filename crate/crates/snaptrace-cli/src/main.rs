//! Command-line front end: `snaptrace analyze` resolves a structure (a
//! registry benchmark or a model file), runs one search strategy, and
//! writes the CSV/SVG artifact set. Exit status is 0 on completion and
//! nonzero on configuration or run failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use snaptrace::optim::AlgorithmKind;
use snaptrace::runconfig::{default_out_dir, ModelSource, RunConfig, Strategy};
use snaptrace::runner;
use snaptrace::sphere::ScheduleMode;

#[derive(Parser)]
#[command(name = "snaptrace", version)]
#[command(about = "Equilibrium-path analysis of nonlinear trusses with gradient-free optimizers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one search strategy on a structure and write CSV/SVG artifacts
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Registry benchmark id (eight-member, sixteen-member,
    /// twentyfour-member, reticular-beam, two-bar-oracle)
    #[arg(long, value_name = "ID", conflicts_with = "model", required_unless_present = "model")]
    benchmark: Option<String>,

    /// Model file (TOML) instead of a registry benchmark
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,

    /// Search strategy: single, informed, or hypersphere
    #[arg(long, value_name = "NAME")]
    strategy: String,

    /// Optimizer id (de-rand-1-bin, de-best-2-bin, pso-std, pso-const, sa)
    #[arg(long, value_name = "ID")]
    algo: String,

    /// Master seed; all run seeds derive from it
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,

    /// Output directory (default: $SNAPTRACE_OUT, else ./snaptrace-out)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Also write an SVG overlay of the deformed shape
    #[arg(long)]
    svg: bool,

    /// Independent runs for the single/informed strategies
    #[arg(long, value_name = "N", default_value_t = 1)]
    runs: usize,

    /// Initial sphere radius in mm (hypersphere strategy)
    #[arg(long, value_name = "MM")]
    r0: Option<f64>,

    /// Stop tracing at this control-point displacement in mm
    #[arg(long, value_name = "MM")]
    d_max: Option<f64>,

    /// Radius schedule: fixed, halving, or additive
    #[arg(long, value_name = "NAME", default_value = "fixed")]
    schedule: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze(args) => match analyze(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(message) => {
                eprintln!("error: {message}");
                ExitCode::FAILURE
            }
        },
    }
}

fn analyze(args: AnalyzeArgs) -> Result<(), String> {
    let model = match (&args.benchmark, &args.model) {
        (Some(id), None) => ModelSource::Benchmark(id.parse()?),
        (None, Some(path)) => ModelSource::File(path.clone()),
        // clap enforces exactly one of the two
        _ => unreachable!("benchmark/model exclusivity is declared on the arguments"),
    };
    let strategy: Strategy = args.strategy.parse()?;
    let algorithm: AlgorithmKind = args.algo.parse()?;
    let schedule: ScheduleMode = args.schedule.parse()?;

    let mut config = RunConfig::new(model, strategy, algorithm);
    config.seed = args.seed;
    config.runs = args.runs;
    config.out_dir = args.out.unwrap_or_else(default_out_dir);
    config.svg = args.svg;
    config.schedule = schedule;
    config.r0 = args.r0;
    config.d_max = args.d_max;

    let artifacts = runner::run(&config).map_err(|e| e.to_string())?;

    println!("wrote {}", artifacts.results_csv.display());
    if let Some(path) = &artifacts.profile_csv {
        println!("wrote {}", path.display());
    }
    if let Some(path) = &artifacts.svg {
        println!("wrote {}", path.display());
    }
    match artifacts.stop {
        Some(stop) => println!(
            "{} candidates, {} centers, stop: {stop}",
            artifacts.rows, artifacts.converged
        ),
        None => println!(
            "{} candidates, {}/{} runs converged",
            artifacts.rows, artifacts.converged, config.runs
        ),
    }
    Ok(())
}
