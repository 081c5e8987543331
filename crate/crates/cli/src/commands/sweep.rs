use anyhow::{bail, Result};
use phaselab::phase::PhaseFunction;
use phaselab::relations::{evaluate_phase_number_relations, evaluate_relations, UncertaintyReport};
use phaselab::state::seeded_random_state;
use rayon::prelude::*;
use serde::Serialize;

use super::{parse_f1, Status};
use crate::config::{ExperimentConfig, Format};
use crate::output::Sink;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Number of random states.
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long, default_value = "exp-", value_parser = parse_f1)]
    pub f1: PhaseFunction,
}

#[derive(Serialize)]
struct Row {
    index: usize,
    var1: f64,
    var2: f64,
    rs_gap: f64,
    hr_gap: f64,
    tri_gap: f64,
}

/// State `i` is `seeded_random_state(n_trunc, seed, i)`, so the output
/// depends only on the configuration.
pub fn gaps(f1: PhaseFunction, n_trunc: usize, seed: u64, count: usize) -> Vec<UncertaintyReport> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let s = seeded_random_state(n_trunc, seed, i);
            match f1 {
                PhaseFunction::WrappedPhi => evaluate_phase_number_relations(&s).report,
                _ => evaluate_relations(&s, f1),
            }
        })
        .collect()
}

pub fn run(cfg: &ExperimentConfig, sink: &Sink, args: Args) -> Result<Status> {
    if args.count == 0 {
        bail!("--count must be at least 1");
    }
    let reports = gaps(args.f1, cfg.n_trunc, cfg.seed, args.count);
    match cfg.format_or(Format::Csv) {
        Format::Csv => {
            let mut text = format!("index,{}\n", UncertaintyReport::csv_header());
            for (i, r) in reports.iter().enumerate() {
                text.push_str(&format!("{i},{}\n", r.csv_row()));
            }
            sink.emit("sweep-random.csv", &text)?;
        }
        Format::Json => {
            let rows: Vec<Row> = reports
                .iter()
                .enumerate()
                .map(|(index, r)| Row { index, var1: r.var1, var2: r.var2, rs_gap: r.rs_gap, hr_gap: r.hr_gap, tri_gap: r.tri_gap })
                .collect();
            sink.emit_json("sweep-random.json", &rows)?;
        }
    }
    let tol = cfg.tol("gap");
    let bad = reports.iter().position(|r| r.min_gap() < -tol);
    Ok(Status::check(bad.is_none(), || {
        let i = bad.unwrap();
        format!("state {i}: gap {:.3e} below −{tol:e}", reports[i].min_gap())
    }))
}
