//! Command-line driver: stage-wise subcommands over a shared output
//! directory. Exit codes: 0 success, 1 usage or configuration error,
//! 2 missing upstream artifact, 3 runtime failure.

mod config;
mod pipeline;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pipeline::{resolve_context, CliResult};

#[derive(Parser)]
#[command(
    name = "semcomp",
    about = "Simulates sensor-side surrogate classifiers fitted to observation localities",
    disable_help_subcommand = true
)]
struct Cli {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,

    /// Output directory for artifacts (overrides `[output] dir`).
    #[arg(long)]
    out_dir: Option<PathBuf>,

    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads for the simulate and aging stages.
    #[arg(long, default_value_t = 1)]
    jobs: usize,

    /// Suppress progress output.
    #[arg(long)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the labeled training dataset from the synthetic world.
    GenWorld,
    /// Train the reference kernel classifier and score it on held-out data.
    TrainGlobal,
    /// Generate the observation trajectory.
    GenTrajectory,
    /// Run the windowed surrogate-fitting sweep; write records and summary.
    Simulate,
    /// Re-evaluate surrogates on delayed windows; write the aging table.
    Aging,
    /// Choose the largest update period meeting the accuracy target.
    Control,
    /// Render the summary and aging plots from the CSV artifacts.
    Report,
}

fn run(cli: Cli) -> CliResult<()> {
    let ctx = resolve_context(&cli.config, cli.out_dir, cli.seed, cli.quiet)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| pipeline::CliError::BadConfig(format!("cannot build thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::GenWorld => pipeline::gen_world(&ctx),
        Command::TrainGlobal => pipeline::train_global(&ctx),
        Command::GenTrajectory => pipeline::gen_trajectory(&ctx),
        Command::Simulate => pipeline::simulate(&ctx),
        Command::Aging => pipeline::aging(&ctx),
        Command::Control => pipeline::control(&ctx),
        Command::Report => pipeline::report(&ctx),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return ExitCode::from(1);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
