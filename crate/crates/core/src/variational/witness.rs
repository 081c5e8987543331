//! Local search for a nearby state with a smaller objective.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::descent::{descend, Run};
use super::objective::{evaluate, Mode};
use super::VariationalConfig;
use crate::error::{domain, Result};
use crate::phase::PhaseFunction;
use crate::state::{sup_norm_distance, FockVector, DEFAULT_SUP_GRID, NORM_TOL};

const MIX_EPS: [f64; 8] = [0.25, 0.1, 0.05, 0.02, 1e-2, 1e-3, 1e-4, 1e-5];
const DESCENT_STEPS: [f64; 6] = [0.5, 0.1, 1e-2, 1e-3, 1e-4, 1e-5];
const FOLLOW_UP_STEPS: usize = 8;
const RANDOM_SIZES: [f64; 3] = [0.5, 0.1, 0.01];
const RANDOM_TRIALS: usize = 200;
/// Random trials spent on a number state before certifying it.
pub const CERTIFICATE_TRIALS: usize = 10_000;
const WITNESS_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessSource {
    /// `√(1−ε) ψ + √ε e^{iθ}|m⟩` with `m` strictly inside the support.
    IntermediateMixing { m: usize, eps: f64, phase: f64 },
    /// Same mixing with a neighbour of the dominant mode, followed by `steps`
    /// descent iterations.
    NeighborMixing { m: usize, eps: f64, phase: f64, steps: usize },
    /// One step of length `step` against the Riemannian gradient.
    Descent { step: f64 },
    RandomTangent { trial: usize, size: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Witness {
    pub objective: f64,
    /// Best nearby state, if any improved on `objective`.
    pub state: Option<FockVector>,
    pub witness_objective: Option<f64>,
    /// `objective − witness_objective`; `0` when nothing was found.
    pub improvement: f64,
    /// Exact sup-norm distance of the witness on a `4096`-point grid.
    pub distance: Option<f64>,
    pub source: Option<WitnessSource>,
    pub trials: usize,
}

impl Witness {
    pub fn found(&self) -> bool {
        self.state.is_some()
    }
}

/// `(2π)^{-1/2} Σ|Δc_n|`, an upper bound on the sup-norm distance.
fn l1_bound(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).sum::<f64>() / (2.0 * PI).sqrt()
}

fn normalized(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    v
}

fn mix(c: &[Complex64], m: usize, eps: f64, phase: f64) -> Vec<Complex64> {
    let keep = (1.0 - eps).sqrt();
    let mut v: Vec<Complex64> = c.iter().map(|x| x * keep).collect();
    v[m] += Complex64::from_polar(eps.sqrt(), phase);
    normalized(v)
}

struct Search<'a> {
    c: &'a [Complex64],
    f1: PhaseFunction,
    mode: Mode,
    radius: f64,
    f0: f64,
    margin: f64,
    best: Option<(Vec<Complex64>, f64, WitnessSource)>,
    trials: usize,
}

impl Search<'_> {
    fn offer(&mut self, v: Vec<Complex64>, source: WitnessSource) {
        self.trials += 1;
        if l1_bound(self.c, &v) > self.radius {
            return;
        }
        let f = evaluate(&v, self.f1, self.mode).value.value;
        let best = self.best.as_ref().map_or(self.f0 - self.margin, |b| b.1);
        if f < best {
            self.best = Some((v, f, source));
        }
    }
}

/// Looks for a state within sup-norm distance `radius` of `state` whose
/// objective is strictly smaller. Tries the constructive mixing directions,
/// the steepest-descent direction and random perturbations. A number state
/// in product mode gets [`CERTIFICATE_TRIALS`] random trials; finding
/// nothing there certifies the (global) minimum.
pub fn neighborhood_witness(state: &FockVector, f1: PhaseFunction, mode: Mode, radius: f64) -> Result<Witness> {
    state.ensure_normalized(NORM_TOL)?;
    if !(radius > 0.0) {
        return domain(format!("search radius must be positive, got {radius}"));
    }
    let c = state.coeffs();
    let top = c.len() - 1;
    let ev = evaluate(c, f1, mode);
    let f0 = ev.value.value;
    let mut s = Search {
        c,
        f1,
        mode,
        radius,
        f0,
        margin: 4.0 * f64::EPSILON * f0.abs(),
        best: None,
        trials: 0,
    };
    let support = state.support();
    let fock = support.len() == 1;

    if mode == Mode::Product && !fock {
        let (lo, hi) = (support[0], support[support.len() - 1]);
        for m in (lo + 1..hi).filter(|m| !support.contains(m)) {
            for eps in MIX_EPS {
                for q in 0..4 {
                    let phase = q as f64 * FRAC_PI_2;
                    s.offer(mix(c, m, eps, phase), WitnessSource::IntermediateMixing { m, eps, phase });
                }
            }
        }
    }

    if mode == Mode::Sum {
        let dominant = c
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()).then(b.0.cmp(&a.0)))
            .map(|(n, _)| n)
            .unwrap_or(0);
        let cfg = VariationalConfig::default();
        for m in [dominant.checked_sub(1), Some(dominant + 1)].into_iter().flatten().filter(|&m| m <= top) {
            for eps in MIX_EPS {
                for q in 0..4 {
                    let phase = q as f64 * FRAC_PI_2;
                    let mut run = Run::new(mix(c, m, eps, phase), f1, mode);
                    s.offer(run.c.clone(), WitnessSource::NeighborMixing { m, eps, phase, steps: 0 });
                    for steps in 1..=FOLLOW_UP_STEPS {
                        descend(&mut run, f1, mode, &cfg, 1, None);
                        if run.iterations < steps {
                            break;
                        }
                        s.offer(run.c.clone(), WitnessSource::NeighborMixing { m, eps, phase, steps });
                    }
                }
            }
        }
    }

    for step in DESCENT_STEPS {
        let v = normalized(c.iter().zip(&ev.tangent).map(|(x, g)| x - g * step).collect());
        s.offer(v, WitnessSource::Descent { step });
    }

    let trials = if mode == Mode::Product && fock { CERTIFICATE_TRIALS } else { RANDOM_TRIALS };
    let mut rng = ChaCha8Rng::seed_from_u64(WITNESS_SEED);
    for trial in 0..trials {
        let dir: Vec<Complex64> =
            (0..=top).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        let radial: Complex64 = c.iter().zip(&dir).map(|(a, d)| a.conj() * d).sum();
        let tangent: Vec<Complex64> = dir.iter().zip(c).map(|(d, a)| d - a * radial).collect();
        let len = l1_bound(&tangent, &vec![Complex64::new(0.0, 0.0); top + 1]);
        let size = RANDOM_SIZES[trial % RANDOM_SIZES.len()];
        let scale = size * radius / len;
        let v = normalized(c.iter().zip(&tangent).map(|(a, t)| a + t * scale).collect());
        s.offer(v, WitnessSource::RandomTangent { trial, size });
    }

    let trials = s.trials;
    Ok(match s.best {
        Some((v, f, source)) => {
            let w = FockVector::from_coeffs(v)?;
            let distance = sup_norm_distance(state, &w, DEFAULT_SUP_GRID)?.value();
            Witness {
                objective: f0,
                witness_objective: Some(f),
                improvement: f0 - f,
                distance: Some(distance),
                source: Some(source),
                state: Some(w),
                trials,
            }
        }
        None => Witness {
            objective: f0,
            state: None,
            witness_objective: None,
            improvement: 0.0,
            distance: None,
            source: None,
            trials,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{intermediate_perturbation_bound, make_fock_state, make_two_mode_superposition};

    #[test]
    fn two_mode_product_witness_uses_intermediate_mode() {
        let s = make_two_mode_superposition(0, 2, 0.0, 0.0, 8).unwrap();
        let w = neighborhood_witness(&s, PhaseFunction::ExpMinus, Mode::Product, 0.2).unwrap();
        assert!(w.found());
        assert!(w.improvement > 0.0);
        assert!(w.distance.unwrap() <= 0.2);
        // the ε = 0.1, m = 1 mixing alone already improves
        let p = mix(s.coeffs(), 1, 0.1, 0.0);
        let f = evaluate(&p, PhaseFunction::ExpMinus, Mode::Product).value.value;
        assert!(f < w.objective);
        assert!(l1_bound(s.coeffs(), &p) >= intermediate_perturbation_bound(0.1) - 1e-12);
    }

    #[test]
    fn vacuum_sum_witness_drops_below_one() {
        let s = make_fock_state(0, 8).unwrap();
        let w = neighborhood_witness(&s, PhaseFunction::ExpMinus, Mode::Sum, 0.2).unwrap();
        assert!(w.found());
        assert!(w.witness_objective.unwrap() < 1.0);
        assert!(w.distance.unwrap() <= 0.2);
    }

    #[test]
    fn vacuum_product_is_certified() {
        let s = make_fock_state(0, 8).unwrap();
        let w = neighborhood_witness(&s, PhaseFunction::ExpMinus, Mode::Product, 0.2).unwrap();
        assert!(!w.found());
        assert!(w.improvement <= 0.0);
        assert!(w.trials >= CERTIFICATE_TRIALS);
    }

    #[test]
    fn radius_must_be_positive() {
        let s = make_fock_state(0, 8).unwrap();
        assert!(neighborhood_witness(&s, PhaseFunction::ExpMinus, Mode::Sum, 0.0).is_err());
    }
}
