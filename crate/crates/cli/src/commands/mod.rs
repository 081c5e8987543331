pub mod intelligent;
pub mod minimize;
pub mod relations;
pub mod reproduce;
pub mod sweep;
pub mod wigner;

use std::path::Path;

use anyhow::{Context, Result};
use phaselab::phase::PhaseFunction;
use phaselab::relations::UncertaintyReport;
use phaselab::state::NORM_TOL;
use phaselab::Complex64;
use phaselab::FockVector;

use crate::config::ExperimentConfig;

/// Outcome of a command that ran to completion.
#[derive(Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Violation(String),
}

impl Status {
    pub fn check(ok: bool, msg: impl FnOnce() -> String) -> Self {
        if ok {
            Status::Ok
        } else {
            Status::Violation(msg())
        }
    }
}

pub fn load_state(path: &Path) -> Result<FockVector> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading state file {}", path.display()))?;
    let state = FockVector::from_json(&text).with_context(|| format!("loading state file {}", path.display()))?;
    state.ensure_normalized(NORM_TOL).with_context(|| format!("state file {}", path.display()))?;
    Ok(state)
}

pub fn parse_f1(s: &str) -> Result<PhaseFunction> {
    Ok(s.parse()?)
}

/// Accepts `re,im` as well as the `a+bi` forms (`1`, `2i`, `1+1i`, `0.5-2i`).
pub fn parse_complex(s: &str) -> Result<Complex64> {
    if let Some((re, im)) = s.split_once(',') {
        let re: f64 = re.trim().parse().with_context(|| format!("`{s}` is not a complex number"))?;
        let im: f64 = im.trim().parse().with_context(|| format!("`{s}` is not a complex number"))?;
        return Ok(Complex64::new(re, im));
    }
    let z: Complex64 = s.trim().parse().map_err(|_| anyhow::anyhow!("`{s}` is not a complex number"))?;
    if !z.re.is_finite() || !z.im.is_finite() {
        anyhow::bail!("`{s}` is not finite");
    }
    Ok(z)
}

/// Re-derives the saturation flags with the configured tolerance.
pub fn with_saturation(mut r: UncertaintyReport, cfg: &ExperimentConfig) -> UncertaintyReport {
    let tol = cfg.tol("saturation");
    r.rs_saturated = r.rs_gap.abs() <= tol;
    r.hr_saturated = r.hr_gap.abs() <= tol;
    r.tri_saturated = r.tri_gap.abs() <= tol;
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("1").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("1+1i").unwrap(), Complex64::new(1.0, 1.0));
        assert_eq!(parse_complex("0.5,-2").unwrap(), Complex64::new(0.5, -2.0));
        assert!(parse_complex("one").is_err());
        assert!(parse_complex("inf").is_err());
    }
}
