//! Experiment settings: defaults, then the JSON file named by
//! `PHASELAB_CONFIG`, then command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::Value;

pub const CONFIG_ENV: &str = "PHASELAB_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => bail!("unknown format `{other}` (expected csv or json)"),
        }
    }
}

/// Named tolerances and their defaults.
pub const DEFAULT_TOLERANCES: [(&str, f64); 5] = [
    // a relation gap below −gap is a violation
    ("gap", 1e-9),
    // |gap| ≤ saturation counts as equality
    ("saturation", 1e-9),
    // stopping residual of the descent, and the intelligent-state check
    ("residual", 1e-8),
    // smallest Fourier defect that rules out a periodic cylinder solution
    ("fourier", 1e-6),
    // λ-disc excluded from no-go scans
    ("nogo_delta", 1e-3),
];

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub n_trunc: usize,
    pub quadrature_points: usize,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub output_dir: Option<PathBuf>,
    /// `None` leaves the choice to each command.
    pub format: Option<Format>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_trunc: 64,
            quadrature_points: 2048,
            seed: 0,
            tolerances: DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            output_dir: None,
            format: None,
        }
    }
}

/// Values given on the command line; `None` means "not given".
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub n_trunc: Option<usize>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub tolerances: Vec<(String, f64)>,
}

impl ExperimentConfig {
    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    /// Defaults, then the file at `$PHASELAB_CONFIG` (if set), then `flags`.
    pub fn resolve(flags: &Overrides) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(path) = std::env::var_os(CONFIG_ENV) {
            cfg.apply_file(Path::new(&path))?;
        }
        cfg.apply_overrides(flags)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn set_tolerance(&mut self, name: &str, value: f64) -> Result<()> {
        match self.tolerances.get_mut(name) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => bail!(
                "unknown tolerance `{name}` (known: {})",
                DEFAULT_TOLERANCES.iter().map(|(k, _)| *k).collect::<Vec<_>>().join(", ")
            ),
        }
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let doc: Value = serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let map = doc.as_object().ok_or_else(|| anyhow!("config must be a flat JSON object"))?;
        for (key, value) in map {
            let bad = || anyhow!("config key `{key}` has an invalid value {value}");
            match key.as_str() {
                "n_trunc" => self.n_trunc = value.as_u64().ok_or_else(bad)? as usize,
                "quadrature_points" => self.quadrature_points = value.as_u64().ok_or_else(bad)? as usize,
                "seed" => self.seed = value.as_u64().ok_or_else(bad)?,
                "output_dir" => self.output_dir = Some(PathBuf::from(value.as_str().ok_or_else(bad)?)),
                "format" => self.format = Some(value.as_str().ok_or_else(bad)?.parse()?),
                k => match k.strip_prefix("tol.") {
                    Some(name) => self.set_tolerance(name, value.as_f64().ok_or_else(bad)?)?,
                    None => bail!("unknown config key `{k}`"),
                },
            }
        }
        Ok(())
    }

    pub fn apply_overrides(&mut self, o: &Overrides) -> Result<()> {
        if let Some(n) = o.n_trunc {
            self.n_trunc = n;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(d) = &o.output_dir {
            self.output_dir = Some(d.clone());
        }
        if let Some(f) = o.format {
            self.format = Some(f);
        }
        for (name, value) in &o.tolerances {
            self.set_tolerance(name, *value)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trunc < 8 {
            bail!("n_trunc must be at least 8, got {}", self.n_trunc);
        }
        if !self.quadrature_points.is_power_of_two() || self.quadrature_points < 256 {
            bail!("quadrature_points must be a power of two ≥ 256, got {}", self.quadrature_points);
        }
        for (name, v) in &self.tolerances {
            if !(*v > 0.0) || !v.is_finite() {
                bail!("tolerance `{name}` must be positive, got {v}");
            }
        }
        Ok(())
    }
}

/// Removes `--tol.<name> <value>` and `--tol.<name>=<value>` from `args`,
/// returning the remaining arguments and the parsed tolerances.
pub fn split_tolerance_flags(args: Vec<String>) -> Result<(Vec<String>, Vec<(String, f64)>)> {
    let mut rest = Vec::with_capacity(args.len());
    let mut tols = Vec::new();
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        let Some(spec) = arg.strip_prefix("--tol.") else {
            rest.push(arg);
            continue;
        };
        let (name, raw) = match spec.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let v = it.next().ok_or_else(|| anyhow!("--tol.{spec} needs a value"))?;
                (spec.to_string(), v)
            }
        };
        if name.is_empty() {
            bail!("--tol. needs a tolerance name");
        }
        let value: f64 = raw.parse().with_context(|| format!("--tol.{name}: `{raw}` is not a number"))?;
        tols.push((name, value));
    }
    Ok((rest, tols))
}
