use std::path::PathBuf;

use anyhow::Result;
use phaselab::phase::PhaseFunction;
use phaselab::relations::{evaluate_phase_number_relations, evaluate_relations, UncertaintyReport};
use serde::Serialize;

use super::{load_state, parse_f1, with_saturation, Status};
use crate::config::{ExperimentConfig, Format};
use crate::output::Sink;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// State file (`{"n_trunc": N, "coeffs": [[re, im], ...]}`).
    #[arg(long)]
    pub state: PathBuf,
    /// Phase function: phi, exp+, exp-, cos or sin.
    #[arg(long, default_value = "exp-", value_parser = parse_f1)]
    pub f1: PhaseFunction,
}

#[derive(Serialize)]
struct Document {
    f1: PhaseFunction,
    n_trunc: usize,
    digest: String,
    report: UncertaintyReport,
    /// Wrapped phase only: reference point and boundary terms.
    #[serde(skip_serializing_if = "Option::is_none")]
    phase_number: Option<PhaseNumberExtras>,
}

#[derive(Serialize)]
struct PhaseNumberExtras {
    gamma0: f64,
    mean_phi: f64,
    mean_n: f64,
    boundary_density: f64,
    second_bracket: f64,
}

pub fn run(cfg: &ExperimentConfig, sink: &Sink, args: Args) -> Result<Status> {
    let state = load_state(&args.state)?;
    let (report, extras) = if args.f1 == PhaseFunction::WrappedPhi {
        let r = evaluate_phase_number_relations(&state);
        let extras = PhaseNumberExtras {
            gamma0: r.gamma0,
            mean_phi: r.mean_phi,
            mean_n: r.mean_n,
            boundary_density: r.boundary_density,
            second_bracket: r.second_bracket,
        };
        (r.report, Some(extras))
    } else {
        (evaluate_relations(&state, args.f1), None)
    };
    let report = with_saturation(report, cfg);
    match cfg.format_or(Format::Json) {
        Format::Json => sink.emit_json(
            "relations.json",
            &Document {
                f1: args.f1,
                n_trunc: state.n_trunc(),
                digest: state.digest(),
                report,
                phase_number: extras,
            },
        )?,
        Format::Csv => sink.emit(
            "relations.csv",
            &format!(
                "{},rs_saturated,hr_saturated,tri_saturated\n{},{},{},{}\n",
                UncertaintyReport::csv_header(),
                report.csv_row(),
                report.rs_saturated,
                report.hr_saturated,
                report.tri_saturated
            ),
        )?,
    }
    let tol = cfg.tol("gap");
    Ok(Status::check(report.min_gap() >= -tol, || {
        format!("relation gap {:.3e} below −{tol:e}", report.min_gap())
    }))
}
