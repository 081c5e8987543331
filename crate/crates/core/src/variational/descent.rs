use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::objective::{evaluate, product_stationarity_residual, sum_stationarity_residual, Evaluation, Mode};
use super::{VariationalConfig, VariationalResult};
use crate::error::{PhaseLabError, Result};
use crate::phase::PhaseFunction;
use crate::state::{seeded_random_state, FockVector, NORM_TOL};

/// Objective differences below this many ulps of `|F|` are treated as noise.
const NOISE_ULPS: f64 = 16.0;

/// Iteration budget of the trial descents launched from escape candidates.
const ESCAPE_ITERS: usize = 100;

const ESCAPE_MIXES: [f64; 1] = [0.05];
const ESCAPE_RANDOM: usize = 2;
const ESCAPE_RANDOM_SCALE: f64 = 0.05;

fn normalize(v: &mut [Complex64]) {
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

fn re_inner(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum()
}

pub(crate) struct Run {
    pub c: Vec<Complex64>,
    pub ev: Evaluation,
    pub iterations: usize,
}

impl Run {
    pub fn new(c: Vec<Complex64>, f1: PhaseFunction, mode: Mode) -> Self {
        let ev = evaluate(&c, f1, mode);
        Self { c, ev, iterations: 0 }
    }
}

/// Armijo descent along `−g_t` with steps capped by the Barzilai–Borwein
/// estimate. Returns once the residual is below `tol`, the line search can
/// no longer make progress, or the budget runs out.
pub(crate) fn descend(
    run: &mut Run,
    f1: PhaseFunction,
    mode: Mode,
    cfg: &VariationalConfig,
    budget: usize,
    mut trace: Option<&mut Vec<(usize, f64)>>,
) {
    let mut bb: Option<f64> = None;
    for _ in 0..budget {
        if run.ev.residual(mode) < cfg.tol {
            return;
        }
        let f = run.ev.value.value;
        let g = &run.ev.tangent;
        let gn2 = re_inner(g, g);
        let noise = NOISE_ULPS * f64::EPSILON * f.abs().max(f64::MIN_POSITIVE);
        let mut t = bb.map_or(cfg.initial_step, |b| b.min(cfg.max_step));
        let mut accepted = None;
        for _ in 0..=cfg.max_halvings {
            let mut trial: Vec<Complex64> = run.c.iter().zip(g).map(|(c, d)| c - d * t).collect();
            normalize(&mut trial);
            let ev = evaluate(&trial, f1, mode);
            let fv = ev.value.value;
            let sufficient = fv <= f - cfg.armijo * t * gn2;
            // once the predicted decrease is below rounding, accept any step that
            // keeps the objective level and shrinks the gradient
            let level = cfg.armijo * t * gn2 < noise && fv <= f + noise && ev.tangent_norm() < gn2.sqrt();
            if sufficient || level {
                accepted = Some((trial, ev, t));
                break;
            }
            t *= 0.5;
        }
        let Some((trial, ev, _)) = accepted else {
            return;
        };
        let s: Vec<Complex64> = trial.iter().zip(&run.c).map(|(a, b)| a - b).collect();
        let y: Vec<Complex64> = ev.tangent.iter().zip(g).map(|(a, b)| a - b).collect();
        let sy = re_inner(&s, &y);
        bb = (sy > 0.0).then(|| re_inner(&s, &s) / sy);
        run.c = trial;
        run.ev = ev;
        run.iterations += 1;
        if let Some(tr) = trace.as_deref_mut() {
            if run.iterations % cfg.trace_stride.max(1) == 0 {
                tr.push((run.iterations, run.ev.value.value));
            }
        }
    }
}

fn escape_candidates(c: &[Complex64], rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    let top = c.len() - 1;
    let mut order: Vec<usize> = (0..=top).collect();
    order.sort_by(|&a, &b| c[b].norm().total_cmp(&c[a].norm()).then(a.cmp(&b)));
    let mut out = Vec::new();
    for &n in order.iter().take(1) {
        for m in [n.checked_sub(1), n.checked_add(1)].into_iter().flatten() {
            if m > top {
                continue;
            }
            for eps in ESCAPE_MIXES {
                for q in 0..4 {
                    let keep = (1.0 - eps).sqrt();
                    let mut v: Vec<Complex64> = c.iter().map(|x| x * keep).collect();
                    v[m] += Complex64::from_polar(eps.sqrt(), q as f64 * FRAC_PI_2);
                    normalize(&mut v);
                    out.push(v);
                }
            }
        }
    }
    for _ in 0..ESCAPE_RANDOM {
        let mut v: Vec<Complex64> = c
            .iter()
            .map(|x| x + Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * ESCAPE_RANDOM_SCALE)
            .collect();
        normalize(&mut v);
        out.push(v);
    }
    out
}

/// Tries to leave a stationary point that is not a local minimum. Returns
/// the best trial run whose objective improves on the current one by more
/// than rounding.
fn try_escape(run: &Run, f1: PhaseFunction, mode: Mode, cfg: &VariationalConfig, rng: &mut ChaCha8Rng) -> Option<Run> {
    let f = run.ev.value.value;
    let margin = 1e-12 * f.abs().max(1e-2);
    escape_candidates(&run.c, rng)
        .into_iter()
        .filter_map(|c| {
            let ev = evaluate(&c, f1, mode);
            let mut trial = Run { c, ev, iterations: 0 };
            descend(&mut trial, f1, mode, cfg, ESCAPE_ITERS, None);
            (trial.ev.value.value < f - margin).then_some(trial)
        })
        .min_by(|a, b| a.ev.value.value.total_cmp(&b.ev.value.value))
}

/// Constrained descent of the product or sum objective from `init`.
pub fn minimize(f1: PhaseFunction, mode: Mode, init: &FockVector, cfg: &VariationalConfig) -> Result<VariationalResult> {
    init.ensure_normalized(NORM_TOL)?;
    let c = init.coeffs().to_vec();
    let ev = evaluate(&c, f1, mode);
    let mut run = Run { c, ev, iterations: 0 };
    let mut trace = vec![(0, run.ev.value.value)];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut escapes = 0;
    loop {
        let budget = cfg.max_iters.saturating_sub(run.iterations);
        descend(&mut run, f1, mode, cfg, budget, Some(&mut trace));
        let stationary = run.ev.residual(mode) < cfg.tol;
        // a zero product is a global minimum; nothing to escape from
        let at_floor = mode == Mode::Product && run.ev.value.value <= cfg.tol * cfg.tol;
        if !stationary || at_floor || escapes >= cfg.escape_attempts || run.iterations >= cfg.max_iters {
            break;
        }
        match try_escape(&run, f1, mode, cfg, &mut rng) {
            Some(next) => {
                escapes += 1;
                run.c = next.c;
                run.ev = next.ev;
                run.iterations += next.iterations;
                trace.push((run.iterations, run.ev.value.value));
            }
            None => break,
        }
    }
    if trace.last().map(|&(it, _)| it) != Some(run.iterations) {
        trace.push((run.iterations, run.ev.value.value));
    }
    let residual = run.ev.residual(mode);
    let state = FockVector::from_coeffs(run.c)?;
    let full_residual = match mode {
        Mode::Product => product_stationarity_residual(&state, f1).ok(),
        Mode::Sum => Some(sum_stationarity_residual(&state, f1)),
    };
    Ok(VariationalResult {
        mode,
        f1,
        objective: run.ev.value.value,
        var1: run.ev.value.var1,
        var2: run.ev.value.var2,
        gamma0: run.ev.value.gamma0,
        residual,
        full_residual,
        iterations: run.iterations,
        converged: residual < cfg.tol,
        escapes,
        seed: cfg.seed,
        trace,
        state,
    })
}

fn fit(init: &FockVector, n_trunc: usize) -> Result<FockVector> {
    if init.n_trunc() > n_trunc {
        return Err(PhaseLabError::Dimension { left: init.dim(), right: n_trunc + 1 });
    }
    init.padded(n_trunc)
}

/// Minimizes `(Δf₁)²(Δn)²` on the truncated space `0..=n_trunc`.
pub fn minimize_product(
    f1: PhaseFunction,
    n_trunc: usize,
    init: &FockVector,
    cfg: &VariationalConfig,
) -> Result<VariationalResult> {
    minimize(f1, Mode::Product, &fit(init, n_trunc)?, cfg)
}

/// Minimizes `(Δf₁)² + (Δn)²` on the truncated space `0..=n_trunc`.
pub fn minimize_sum(
    f1: PhaseFunction,
    n_trunc: usize,
    init: &FockVector,
    cfg: &VariationalConfig,
) -> Result<VariationalResult> {
    minimize(f1, Mode::Sum, &fit(init, n_trunc)?, cfg)
}

fn pick_best(runs: &[VariationalResult]) -> Option<&VariationalResult> {
    runs.iter().min_by(|a, b| a.objective.total_cmp(&b.objective).then(a.seed.cmp(&b.seed)))
}

/// Runs `starts` independent descents in parallel. Start `i` uses the random
/// state `seeded_random_state(n_trunc, seed + i, 0)` and escape seed
/// `seed + i`. Results come back in seed order.
pub fn multi_start(
    f1: PhaseFunction,
    mode: Mode,
    n_trunc: usize,
    starts: usize,
    seed: u64,
    cfg: &VariationalConfig,
) -> Result<Vec<VariationalResult>> {
    (0..starts as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i);
            let init = seeded_random_state(n_trunc, s, 0);
            minimize(f1, mode, &init, &VariationalConfig { seed: s, ..cfg.clone() })
        })
        .collect()
}

/// Best run of a batch: lowest objective, ties to the lowest seed.
pub fn best_run(runs: &[VariationalResult]) -> Option<&VariationalResult> {
    pick_best(runs)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n_trunc: usize,
    pub best: VariationalResult,
    pub runs: usize,
}

/// Best objective for each truncation in `truncs`. Every level after the
/// first also restarts from the previous optimum, embedded in the larger space.
pub fn truncation_sweep(
    f1: PhaseFunction,
    mode: Mode,
    truncs: &[usize],
    starts: usize,
    seed: u64,
    cfg: &VariationalConfig,
) -> Result<Vec<SweepPoint>> {
    let mut out: Vec<SweepPoint> = Vec::with_capacity(truncs.len());
    for &n in truncs {
        let mut runs = multi_start(f1, mode, n, starts, seed, cfg)?;
        if let Some(prev) = out.last() {
            if prev.n_trunc <= n {
                let init = prev.best.state.padded(n)?;
                let s = seed.wrapping_add(starts as u64);
                runs.push(minimize(f1, mode, &init, &VariationalConfig { seed: s, ..cfg.clone() })?);
            }
        }
        let best = pick_best(&runs).cloned().ok_or_else(|| PhaseLabError::Domain("no starts requested".into()))?;
        out.push(SweepPoint { n_trunc: n, best, runs: runs.len() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{make_fock_state, make_two_mode_superposition, perturb_intermediate};

    fn quick() -> VariationalConfig {
        VariationalConfig { max_iters: 20_000, ..VariationalConfig::default() }
    }

    #[test]
    fn product_descent_reaches_number_state() {
        for f1 in [PhaseFunction::ExpMinus, PhaseFunction::WrappedPhi] {
            let init = seeded_random_state(8, 3, 0);
            let r = minimize_product(f1, 8, &init, &quick()).unwrap();
            assert!(r.converged, "{f1}: residual {}", r.residual);
            assert!(r.objective < 1e-10, "{f1}: {}", r.objective);
            assert!(r.nearest_fock().1 < 1e-4);
        }
    }

    #[test]
    fn cos_product_has_a_non_number_stationary_point() {
        // localized near φ = ±π/2, (Δcos φ)² is small enough to beat |n⟩
        let init = seeded_random_state(8, 3, 0);
        let r = minimize_product(PhaseFunction::CosPhi, 8, &init, &quick()).unwrap();
        assert!(r.converged);
        assert!(r.objective > 1e-3 && r.nearest_fock().1 > 0.5);
    }

    #[test]
    fn trace_is_monotone_and_normalized() {
        let init = seeded_random_state(10, 11, 0);
        let r = minimize_sum(PhaseFunction::ExpMinus, 10, &init, &quick()).unwrap();
        for w in r.trace.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-14 * w[0].1.abs(), "{:?}", w);
            assert!(w[1].0 > w[0].0);
        }
        assert!((r.state.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(r.objective < 1.0);
    }

    #[test]
    fn vacuum_is_left_by_sum_descent() {
        let init = make_fock_state(0, 8).unwrap();
        let r = minimize_sum(PhaseFunction::ExpMinus, 8, &init, &quick()).unwrap();
        assert!(r.objective < 1.0 - 1e-3, "{}", r.objective);
        assert!(r.converged);
    }

    #[test]
    fn saddle_start_drops_below_saddle_value() {
        let saddle = make_two_mode_superposition(0, 2, 0.0, 0.0, 8).unwrap();
        let v0 = super::super::objective(&saddle, PhaseFunction::ExpMinus, Mode::Product).value;
        let init = perturb_intermediate(&saddle, 1, 1e-3).unwrap();
        let r = minimize_product(PhaseFunction::ExpMinus, 8, &init, &quick()).unwrap();
        assert!(r.objective < v0 - 1e-3);
    }

    #[test]
    fn multi_start_is_deterministic() {
        let cfg = VariationalConfig { max_iters: 300, escape_attempts: 0, ..VariationalConfig::default() };
        let a = multi_start(PhaseFunction::SinPhi, Mode::Sum, 6, 4, 9, &cfg).unwrap();
        let b = multi_start(PhaseFunction::SinPhi, Mode::Sum, 6, 4, 9, &cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.objective.to_bits(), y.objective.to_bits());
            assert_eq!(x.state, y.state);
        }
        let best = best_run(&a).unwrap();
        assert!(a.iter().all(|r| r.objective >= best.objective));
    }

    #[test]
    fn oversized_init_is_rejected() {
        let init = seeded_random_state(10, 0, 0);
        assert!(matches!(
            minimize_sum(PhaseFunction::ExpMinus, 8, &init, &quick()),
            Err(PhaseLabError::Dimension { .. })
        ));
    }
}
