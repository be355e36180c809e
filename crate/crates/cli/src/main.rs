use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eigenfilter_cli::{run_from_path, ExperimentKind, OutputFormat, RunOptions, EXIT_ERROR};

#[derive(Parser)]
#[command(
    name = "eigenfilter",
    version,
    about = "Run energy-filter experiments from a JSON config"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Filtered-state preparation at given centers.
    Filter(RunArgs),
    /// Sweep of the center over the whole normalized window.
    Sweep(RunArgs),
    /// Phase estimation plus amplification of the acceptance projector.
    Naive(RunArgs),
    /// Two-projector decomposition consistency.
    Jordan(RunArgs),
    /// Witness preparation for a verifier circuit.
    Qma(RunArgs),
    /// Gibbs-weighted energy sampling.
    Thermal(RunArgs),
    /// Grid check of the momentum-overlap bounds.
    Bounds(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when neither this nor the config names one.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed_offset: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_ERROR as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (kind, args) = match cli.command {
        Command::Filter(a) => (ExperimentKind::Filter, a),
        Command::Sweep(a) => (ExperimentKind::Sweep, a),
        Command::Naive(a) => (ExperimentKind::Naive, a),
        Command::Jordan(a) => (ExperimentKind::Jordan, a),
        Command::Qma(a) => (ExperimentKind::Qma, a),
        Command::Thermal(a) => (ExperimentKind::Thermal, a),
        Command::Bounds(a) => (ExperimentKind::Bounds, a),
    };
    let options = RunOptions {
        out: args.out,
        format: args.format,
        workers: args.workers,
        seed_offset: args.seed_offset,
    };
    ExitCode::from(run_from_path(kind, &args.config, &options) as u8)
}
