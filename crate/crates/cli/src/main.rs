//! `phaselab`: number–phase uncertainty experiments from the command line.
//!
//! Exit codes: 0 success, 1 bad input, 2 a checked invariant failed.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{intelligent::IntelligentCmd, Status};
use config::{split_tolerance_flags, ExperimentConfig, Format, Overrides};
use output::Sink;

#[derive(Parser, Debug)]
#[command(name = "phaselab", version, about = "Number–phase uncertainty relations, intelligent states and minimum-uncertainty searches")]
#[command(after_help = "Tolerances are set with --tol.<name> <value> (gap, saturation, residual, fourier, nogo_delta).\n\
Settings may also come from a flat JSON file named by PHASELAB_CONFIG; flags win over the file.")]
struct Cli {
    /// Truncation N (states live on |0⟩..|N⟩).
    #[arg(long = "ntrunc", global = true)]
    n_trunc: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; without it the main result goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the uncertainty relations for a state file.
    Relations(commands::relations::Args),
    /// Run the scripted check for one theorem: 2.1, 3.1, 4.1, 4.2, 5.1 or 5.2.
    Reproduce(commands::reproduce::Args),
    /// Relation gaps for seeded random states, one row per state.
    SweepRandom(commands::sweep::Args),
    /// Build, verify or rule out intelligent states.
    #[command(subcommand)]
    Intelligent(IntelligentCmd),
    /// Minimum uncertainty product or sum by projected gradient descent.
    Minimize(commands::minimize::Args),
    /// Number–phase Wigner function or phase density of a state, as CSV.
    Wigner(commands::wigner::Args),
}

fn run(args: Vec<String>) -> anyhow::Result<Status> {
    let (args, tolerances) = split_tolerance_flags(args)?;
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            e.print()?;
            return Ok(Status::Ok);
        }
        Err(e) => anyhow::bail!("{e}"),
    };
    let overrides = Overrides { n_trunc: cli.n_trunc, seed: cli.seed, output_dir: cli.out, format: cli.format, tolerances };
    let cfg = ExperimentConfig::resolve(&overrides)?;
    let sink = Sink::new(cfg.output_dir.as_deref())?;
    match cli.command {
        Command::Relations(a) => commands::relations::run(&cfg, &sink, a),
        Command::Reproduce(a) => commands::reproduce::run(&cfg, &sink, a),
        Command::SweepRandom(a) => commands::sweep::run(&cfg, &sink, a),
        Command::Intelligent(c) => commands::intelligent::run(&cfg, &sink, c),
        Command::Minimize(a) => commands::minimize::run(&cfg, &sink, a),
        Command::Wigner(a) => commands::wigner::run(&cfg, &sink, a),
    }
}

fn main() -> ExitCode {
    match run(std::env::args().collect()) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Violation(msg)) => {
            eprintln!("invariant violated: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
