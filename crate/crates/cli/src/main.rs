use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rdode_cli::config::ExperimentConfig;
use rdode_cli::runner::{
    run_evolve, run_reduce, run_report, run_shoot, run_spectrum, run_steady, RunContext,
};
use rdode_cli::{CliError, CliResult};

/// Numerical laboratory for reaction-diffusion-ODE systems on an interval:
/// constant and non-constant stationary solutions, their linearized spectra,
/// and direct time integration.
#[derive(Parser)]
#[command(name = "rdode", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration (TOML). See docs/config.md.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (defaults to [output].dir or "out").
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also emit SVG plots.
    #[arg(long)]
    svg: bool,
    /// Seed for reproducible perturbations (defaults to [output].seed or 1).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for fan-out-able runs (currently the reduce ε list).
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Find and classify constant steady states.
    Steady(RunArgs),
    /// Construct non-constant stationary profiles by shooting.
    Shoot(RunArgs),
    /// Spectrum of the linearization around a profile.
    Spectrum(RunArgs),
    /// Perturb a stationary profile and fit the growth/decay rate.
    Evolve(RunArgs),
    /// Three-to-two species model-reduction error study.
    Reduce(RunArgs),
    /// Render SVG plots from the CSV artifacts in the output directory.
    Report(RunArgs),
}

fn context(args: &RunArgs, needs_config: bool) -> CliResult<RunContext> {
    let config = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None if needs_config => {
            return Err(CliError::Config("--config is required for this subcommand".into()))
        }
        None => {
            // report runs on artifacts alone; synthesize an empty config
            toml::from_str("[model]\nname = \"gray_scott\"\n[model.params]\nb = 0.04\nk = 0.06\n")
                .map(|config: ExperimentConfig| config)
                .expect("static fallback config parses")
        }
    };
    Ok(RunContext::new(
        config,
        args.out.clone(),
        args.svg,
        args.seed,
        args.threads,
    ))
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Steady(args) => run_steady(&context(&args, true)?),
        Command::Shoot(args) => run_shoot(&context(&args, true)?),
        Command::Spectrum(args) => run_spectrum(&context(&args, true)?),
        Command::Evolve(args) => run_evolve(&context(&args, true)?),
        Command::Reduce(args) => run_reduce(&context(&args, true)?),
        Command::Report(args) => run_report(&context(&args, false)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
