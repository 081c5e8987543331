use std::path::PathBuf;

use anyhow::{bail, Result};
use phaselab::phase::{phase_density_rows, wigner_rows};

use super::{load_state, Status};
use crate::config::{ExperimentConfig, Format};
use crate::output::Sink;

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(long)]
    pub state: PathBuf,
    /// Phase grid size; defaults to the configured quadrature points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Emit the phase density |ψ(φ)|² instead of the Wigner function.
    #[arg(long)]
    pub density: bool,
}

pub fn run(cfg: &ExperimentConfig, sink: &Sink, args: Args) -> Result<Status> {
    if cfg.format_or(Format::Csv) != Format::Csv {
        bail!("wigner writes CSV only");
    }
    let state = load_state(&args.state)?;
    let points = args.points.unwrap_or(cfg.quadrature_points);
    if points == 0 {
        bail!("--points must be positive");
    }
    let mut text = String::new();
    if args.density {
        text.push_str("phi,density\n");
        for (phi, p) in phase_density_rows(&state, points) {
            text.push_str(&format!("{phi:.17e},{p:.17e}\n"));
        }
        sink.emit("phase-density.csv", &text)?;
    } else {
        text.push_str("phi,n,w\n");
        for (phi, n, w) in wigner_rows(&state, points) {
            text.push_str(&format!("{phi:.17e},{n},{w:.17e}\n"));
        }
        sink.emit("wigner.csv", &text)?;
    }
    Ok(Status::Ok)
}
