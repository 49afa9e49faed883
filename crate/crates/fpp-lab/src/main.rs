//! `fpp`: batch experiments for first-passage percolation on the square
//! lattice. Exit codes: 0 ok, 1 compute error, 2 configuration error.

use clap::{Args, Parser, Subcommand};
use fpp_lab::{config::ExperimentKind, emit_plot_data, runner, ExperimentConfig, RunError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fpp", version, about = "First-passage percolation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration file; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread override (0 = one per core). The FPP_THREADS
    /// environment variable overrides both this flag and the config.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Transversal-fluctuation scan and xi fit.
    Xi(RunArgs),
    /// Variance scan of T(0, n u) and chi fit.
    Chi(RunArgs),
    /// Shape-boundary estimate over a theta grid.
    Shape(RunArgs),
    /// Curvature exponents at the estimated cone endpoint.
    Curvature(RunArgs),
    /// Right-edge speed curve over a p grid.
    Alpha(RunArgs),
    /// Origin-conditioned right-edge traces and break points.
    Breakpoints(RunArgs),
    /// Flat-segment endpoints and boundary deviation inside the cone.
    Flatseg(RunArgs),
    /// Convert run artifacts to a tidy plotting CSV.
    Plotdata {
        /// Artifact files to convert.
        inputs: Vec<PathBuf>,
        /// Directory receiving plot.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn resolve_config(kind: ExperimentKind, args: &RunArgs) -> Result<ExperimentConfig, String> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            ExperimentConfig::parse(kind, &text)?
        }
        None => ExperimentConfig::default_for(kind),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(threads) = args.threads {
        cfg.threads = threads;
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    if let Ok(value) = std::env::var("FPP_THREADS") {
        cfg.threads = value
            .parse()
            .map_err(|_| format!("FPP_THREADS must be an integer, got '{value}'"))?;
    }
    Ok(cfg)
}

fn execute(kind: ExperimentKind, args: &RunArgs) -> ExitCode {
    let cfg = match resolve_config(kind, args) {
        Ok(cfg) => cfg,
        Err(message) => {
            eprintln!("fpp: config: {message}");
            return ExitCode::from(2);
        }
    };
    match runner::run(&cfg) {
        Ok(manifest) => {
            println!(
                "{}: wrote {} artifacts to {} in {:.2}s",
                kind.as_str(),
                manifest.outputs.len(),
                cfg.out_dir.display(),
                manifest.wall_seconds
            );
            ExitCode::SUCCESS
        }
        Err(RunError::Config(message)) => {
            eprintln!("fpp: config: {message}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("fpp: {err}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Xi(args) => execute(ExperimentKind::Xi, &args),
        Command::Chi(args) => execute(ExperimentKind::Chi, &args),
        Command::Shape(args) => execute(ExperimentKind::Shape, &args),
        Command::Curvature(args) => execute(ExperimentKind::Curvature, &args),
        Command::Alpha(args) => execute(ExperimentKind::Alpha, &args),
        Command::Breakpoints(args) => execute(ExperimentKind::Breakpoints, &args),
        Command::Flatseg(args) => execute(ExperimentKind::Flatseg, &args),
        Command::Plotdata { inputs, out } => {
            if inputs.is_empty() {
                eprintln!("fpp: config: plotdata needs at least one input file");
                return ExitCode::from(2);
            }
            match emit_plot_data(&inputs, &out) {
                Ok(path) => {
                    println!("plotdata: wrote {}", path.display());
                    ExitCode::SUCCESS
                }
                Err(err) => {
                    eprintln!("fpp: {err}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
