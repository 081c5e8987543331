use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Subcommand;
use phaselab::intelligent::{intelligent_residual, lambda_circle, make_expminus_intelligent, scan_intelligent_nogo, NogoReport};
use phaselab::phase::{expect_phase_function, number_moments, wrapped_phase_variance, PhaseFunction};
use phaselab::relations::{evaluate_phase_number_relations, evaluate_relations, UncertaintyReport};
use phaselab::{Complex64, FockVector};
use serde::Serialize;

use super::{load_state, parse_complex, parse_f1, with_saturation, Status};
use crate::config::ExperimentConfig;
use crate::output::Sink;

#[derive(Subcommand, Debug)]
pub enum IntelligentCmd {
    /// Write the e^{−iφ} intelligent state with base number n and parameter λ.
    Build {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Complex64,
        #[arg(long, default_value_t = 0)]
        n: usize,
    },
    /// Check that a state solves the intelligent-state eigenproblem for λ.
    Verify {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Complex64,
        #[arg(long, default_value = "exp-", value_parser = parse_f1)]
        f1: PhaseFunction,
    },
    /// Scan λ circles for admissible intelligent states of cos, sin or exp+.
    Nogo {
        #[arg(long, value_parser = parse_f1)]
        f1: PhaseFunction,
        /// Circle radii; repeat for several.
        #[arg(long = "radius", default_values_t = [0.5, 1.0, 2.0])]
        radii: Vec<f64>,
        /// Points per circle.
        #[arg(long, default_value_t = 16)]
        points: usize,
        /// Largest base photon number.
        #[arg(long, default_value_t = 3)]
        n_max: usize,
    },
}

#[derive(Serialize)]
struct Verification {
    f1: PhaseFunction,
    lambda: Complex64,
    /// Best-fitting eigenvalue `⟨n⟩ + iλ⟨f₁⟩`.
    mu: Complex64,
    residual: f64,
    report: UncertaintyReport,
    intelligent: bool,
}

fn verify(cfg: &ExperimentConfig, state: &FockVector, f1: PhaseFunction, lambda: Complex64) -> Verification {
    let il = Complex64::new(0.0, 1.0) * lambda;
    let mean_n = number_moments(state).mean;
    let (mean_f1, report) = match f1 {
        PhaseFunction::WrappedPhi => (
            Complex64::new(wrapped_phase_variance(state).stationarity_residual, 0.0),
            evaluate_phase_number_relations(state).report,
        ),
        _ => (expect_phase_function(state, f1), evaluate_relations(state, f1)),
    };
    let mu = mean_n + il * mean_f1;
    let residual = intelligent_residual(state, f1, lambda, mu);
    let report = with_saturation(report, cfg);
    Verification { f1, lambda, mu, residual, report, intelligent: residual <= cfg.tol("residual") && report.rs_saturated }
}

pub fn run(cfg: &ExperimentConfig, sink: &Sink, cmd: IntelligentCmd) -> Result<Status> {
    match cmd {
        IntelligentCmd::Build { lambda, n } => {
            let state = make_expminus_intelligent(n, lambda, cfg.n_trunc)?;
            sink.emit("state.json", &format!("{}\n", state.to_json()))?;
            Ok(Status::Ok)
        }
        IntelligentCmd::Verify { state, lambda, f1 } => {
            let state = load_state(&state)?;
            let v = verify(cfg, &state, f1, lambda);
            sink.emit_json("verify.json", &v)?;
            Ok(Status::check(v.intelligent, || {
                format!("not intelligent for λ = {lambda}: residual {:.3e}, rs gap {:.3e}", v.residual, v.report.rs_gap)
            }))
        }
        IntelligentCmd::Nogo { f1, radii, points, n_max } => {
            if points == 0 || radii.is_empty() {
                bail!("need at least one radius and one point per circle");
            }
            let grid: Vec<Complex64> = radii.iter().flat_map(|&r| lambda_circle(r, points)).collect();
            let report: NogoReport = scan_intelligent_nogo(f1, &grid, n_max, cfg.tol("nogo_delta"))?;
            sink.emit_json("nogo.json", &report)?;
            // the violation shrinks continuously towards λ = 0 but must stay nonzero
            Ok(Status::check(report.min_violation > 0.0, || {
                format!(
                    "λ = {}, n = {} is admissible (forbidden mass {:.3e})",
                    report.argmin.lambda, report.argmin.n, report.min_violation
                )
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_members_verify() {
        let cfg = ExperimentConfig::default();
        let s = make_expminus_intelligent(2, Complex64::new(0.5, 0.3), 64).unwrap();
        let v = verify(&cfg, &s, PhaseFunction::ExpMinus, Complex64::new(0.5, 0.3));
        assert!(v.intelligent, "{}", v.residual);
        assert!((v.mu - Complex64::new(2.0, 0.0)).norm() < 1e-9);
        let w = verify(&cfg, &s, PhaseFunction::ExpMinus, Complex64::new(1.5, 0.0));
        assert!(!w.intelligent);
    }
}
