use anyhow::{bail, Result};
use phaselab::phase::PhaseFunction;
use phaselab::variational::{best_run, multi_start, Mode, VariationalConfig, VariationalResult};
use serde::Serialize;

use super::{parse_f1, Status};
use crate::config::{ExperimentConfig, Format};
use crate::output::Sink;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// product or sum.
    #[arg(long, default_value = "product")]
    pub mode: Mode,
    #[arg(long, default_value = "exp-", value_parser = parse_f1)]
    pub f1: PhaseFunction,
    /// Independent random starts; start i uses seed + i.
    #[arg(long, default_value_t = 1)]
    pub starts: usize,
    #[arg(long)]
    pub max_iters: Option<usize>,
}

#[derive(Serialize)]
struct RunSummary {
    seed: u64,
    objective: f64,
    residual: f64,
    iterations: usize,
    converged: bool,
    nearest_fock: usize,
    fock_distance: f64,
}

#[derive(Serialize)]
struct Document<'a> {
    starts: usize,
    converged: usize,
    best: &'a VariationalResult,
    runs: Vec<RunSummary>,
}

pub fn run(cfg: &ExperimentConfig, sink: &Sink, args: Args) -> Result<Status> {
    if args.starts == 0 {
        bail!("--starts must be at least 1");
    }
    if cfg.format_or(Format::Json) != Format::Json {
        bail!("minimize writes JSON (plus a CSV trace)");
    }
    let mut vcfg = VariationalConfig { tol: cfg.tol("residual"), ..VariationalConfig::default() };
    if let Some(m) = args.max_iters {
        vcfg.max_iters = m;
    }
    let runs = multi_start(args.f1, args.mode, cfg.n_trunc, args.starts, cfg.seed, &vcfg)?;
    let best = best_run(&runs).expect("at least one start");
    let summaries = runs
        .iter()
        .map(|r| {
            let (n, d) = r.nearest_fock();
            RunSummary {
                seed: r.seed,
                objective: r.objective,
                residual: r.residual,
                iterations: r.iterations,
                converged: r.converged,
                nearest_fock: n,
                fock_distance: d,
            }
        })
        .collect();
    let doc = Document { starts: args.starts, converged: runs.iter().filter(|r| r.converged).count(), best, runs: summaries };
    sink.emit_json("minimize.json", &doc)?;
    sink.emit_side("minimize-trace.csv", &best.trace_csv())?;
    Ok(Status::Ok)
}
