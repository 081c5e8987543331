//! Intelligent states: solutions of `[n̂ + iλ f₁(φ) − μ] ψ = 0`.
//!
//! For `f₁ = e^{−iφ}` the solution `e^{−inφ} e^{−iλe^{−iφ}}` contains only
//! nonnegative photon numbers and is physical for every `λ`. For `e^{iφ}`,
//! `cos φ` and `sin φ` the analytic solutions carry weight on the forbidden
//! modes `e^{+ikφ}` unless `λ = 0`; [`scan_intelligent_nogo`] measures that
//! weight over a grid.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, PhaseLabError, Result};
use crate::phase::{apply_phi_power, wrapped_phase_variance, PhaseFunction};
use crate::specfun::{bessel_i, bessel_i_complex};
use crate::spectrum::Spectrum;
use crate::state::FockVector;

/// Largest tail mass tolerated when truncating the `e^{−iφ}` family.
pub const TAIL_MASS_LIMIT: f64 = 1e-10;

/// Default exclusion radius around `λ = 0` for no-go scans.
pub const DEFAULT_NOGO_DELTA: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntelligentFamilyParams {
    pub lambda: Complex64,
    /// Base photon number.
    pub n: usize,
    pub mu: Complex64,
}

impl IntelligentFamilyParams {
    /// `e^{−iφ}` family, whose eigenvalue is `μ = n`.
    pub fn expminus(n: usize, lambda: Complex64) -> Self {
        Self { lambda, n, mu: Complex64::new(n as f64, 0.0) }
    }
}

/// `c_{n+k} ∝ (−iλ)^k / k!`, renormalized after truncation at `n_trunc`.
pub fn make_expminus_intelligent(n: usize, lambda: Complex64, n_trunc: usize) -> Result<FockVector> {
    if n > n_trunc {
        return Err(PhaseLabError::Index { index: n, n_trunc });
    }
    if !lambda.re.is_finite() || !lambda.im.is_finite() {
        return domain("λ must be finite");
    }
    let step = Complex64::new(0.0, -1.0) * lambda;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n_trunc + 1];
    let mut term = Complex64::new(1.0, 0.0);
    for k in 0..=(n_trunc - n) {
        if k > 0 {
            term *= step / k as f64;
        }
        coeffs[n + k] = term;
    }
    let tail = expminus_tail_mass(lambda.norm(), n_trunc - n)?;
    if tail > TAIL_MASS_LIMIT {
        return Err(PhaseLabError::Truncation { tail_mass: tail, limit: TAIL_MASS_LIMIT });
    }
    FockVector::normalized_from(coeffs)
}

/// `Σ_{k>K} |λ|^{2k}/(k!)² / I₀(2|λ|)`.
fn expminus_tail_mass(r: f64, kmax: usize) -> Result<f64> {
    if r == 0.0 {
        return Ok(0.0);
    }
    let norm = bessel_i(0, 2.0 * r)?;
    let mut t = 1.0f64;
    for k in 1..=kmax {
        t *= r * r / (k * k) as f64;
    }
    let mut tail = 0.0;
    let mut k = kmax + 1;
    loop {
        t *= r * r / (k * k) as f64;
        tail += t;
        if t <= 1e-18 * tail.max(f64::MIN_POSITIVE) && (k as f64) > r {
            break;
        }
        if t == 0.0 {
            break;
        }
        k += 1;
    }
    Ok(tail / norm)
}

/// Closed-form moments of the `e^{−iφ}` family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntelligentMoments {
    pub mean_n: f64,
    pub exp_minus: Complex64,
    pub mean_n2: f64,
    pub var_n: f64,
    pub var_exp: f64,
    /// `(Im F₁₂)²` for `f₁ = e^{−iφ}`, `f₂ = n`.
    pub im_cross_sq: f64,
    pub var_cos: f64,
    pub var_sin: f64,
}

pub fn closed_form_moments(params: &IntelligentFamilyParams) -> Result<IntelligentMoments> {
    let lam = params.lambda;
    let r = lam.norm();
    let n = params.n as f64;
    if r == 0.0 {
        return Ok(IntelligentMoments {
            mean_n: n,
            exp_minus: Complex64::new(0.0, 0.0),
            mean_n2: n * n,
            var_n: 0.0,
            var_exp: 1.0,
            im_cross_sq: 0.0,
            var_cos: 0.5,
            var_sin: 0.5,
        });
    }
    let i0 = bessel_i(0, 2.0 * r)?;
    let q1 = bessel_i(1, 2.0 * r)? / i0;
    let q2 = bessel_i(2, 2.0 * r)? / i0;
    let (re2, im2, r2) = (lam.re * lam.re, lam.im * lam.im, r * r);
    let var_exp = 1.0 - q1 * q1;
    Ok(IntelligentMoments {
        mean_n: n + r * q1,
        exp_minus: Complex64::new(0.0, 1.0) * lam.conj() / r * q1,
        mean_n2: n * n + r2 + 2.0 * n * r * q1,
        var_n: r2 * var_exp,
        var_exp,
        // F₁₂ = −iλF₁₁ on this family, so the base photon number drops out
        im_cross_sq: re2 * var_exp * var_exp,
        var_cos: 0.5 + (im2 - re2) / (2.0 * r2) * q2 - im2 / r2 * q1 * q1,
        var_sin: 0.5 + (re2 - im2) / (2.0 * r2) * q2 - re2 / r2 * q1 * q1,
    })
}

/// `‖[n̂ + iλ f₁ − μ] ψ‖` over `[−π, π)`. For the wrapped phase the state is
/// first shifted to its optimal reference point.
pub fn intelligent_residual(state: &FockVector, f1: PhaseFunction, lambda: Complex64, mu: Complex64) -> f64 {
    let il = Complex64::new(0.0, 1.0) * lambda;
    match f1 {
        PhaseFunction::WrappedPhi => {
            let w = wrapped_phase_variance(state);
            let shifted = state.rotated(w.gamma0);
            let c = shifted.coeffs();
            let a: Vec<Complex64> = c.iter().enumerate().map(|(j, x)| x * (j as f64 - mu)).collect();
            let n = shifted.n_trunc() as i64;
            let phi_c = apply_phi_power(c, 1, 0..=n).expect("order 1");
            let cross: Complex64 = a.iter().zip(&phi_c).map(|(x, y)| x.conj() * il * y).sum();
            let total = a.iter().map(|x| x.norm_sqr()).sum::<f64>() + lambda.norm_sqr() * w.variance + 2.0 * cross.re;
            total.max(0.0).sqrt()
        }
        _ => {
            let psi = Spectrum::from_state(state);
            let number = psi.weighted(|n| Complex64::new(n as f64, 0.0) - mu);
            let f1psi = f1.apply(&psi).expect("Fourier-supported kind");
            number.axpy(il, &f1psi).norm_sqr().sqrt()
        }
    }
}

/// `Σ|n+1⟩⟨n|` applied to a state; the result lives on `n_trunc + 1`.
pub fn ladder_shift(state: &FockVector) -> FockVector {
    let mut c = Vec::with_capacity(state.dim() + 1);
    c.push(Complex64::new(0.0, 0.0));
    c.extend_from_slice(state.coeffs());
    FockVector::from_coeffs(c).expect("finite amplitudes")
}

fn check_nogo_kind(f1: PhaseFunction) -> Result<()> {
    match f1 {
        PhaseFunction::ExpPlus | PhaseFunction::CosPhi | PhaseFunction::SinPhi => Ok(()),
        other => domain(format!("no-go scans cover exp+, cos and sin, not {other}")),
    }
}

/// Unnormalized coefficient at index `n − m` of the analytic solution with
/// base number `n`: `(iλ)^m/m!` for `e^{iφ}` (`m ≥ 0`), `J_m(iλ)` for `cos φ`,
/// `I_m(λ)` for `sin φ`.
fn candidate_coefficient(f1: PhaseFunction, lambda: Complex64, m: i64) -> Result<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let abs_m = m.unsigned_abs() as u32;
    match f1 {
        PhaseFunction::ExpPlus => {
            if m < 0 {
                return Ok(zero);
            }
            let il = Complex64::new(0.0, 1.0) * lambda;
            Ok((1..=abs_m).fold(Complex64::new(1.0, 0.0), |t, k| t * il / k as f64))
        }
        PhaseFunction::CosPhi => {
            // J_m(iλ) = i^m I_m(λ), J_{−m} = (−1)^m J_m
            let v = Complex64::new(0.0, 1.0).powu(abs_m) * bessel_i_complex(abs_m, lambda)?;
            Ok(if m < 0 && abs_m % 2 == 1 { -v } else { v })
        }
        PhaseFunction::SinPhi => bessel_i_complex(abs_m, lambda),
        _ => domain("no analytic candidate for this kind"),
    }
}

/// Squared norm of the analytic solution divided by `2π`.
fn candidate_norm_sqr(f1: PhaseFunction, lambda: Complex64) -> Result<f64> {
    match f1 {
        PhaseFunction::ExpPlus => bessel_i(0, 2.0 * lambda.norm()),
        PhaseFunction::CosPhi | PhaseFunction::SinPhi => {
            // |e^{−λ sin φ}|² = e^{−2 Re λ sin φ}, |e^{λ cos φ}|² = e^{2 Re λ cos φ}
            bessel_i(0, 2.0 * lambda.re.abs())
        }
        _ => domain("no analytic candidate for this kind"),
    }
}

/// Normalized Fourier spectrum of the analytic solution of the intelligent
/// equation for `f₁ ∈ {e^{iφ}, cos φ, sin φ}` with eigenvalue `μ = n`, on the
/// index window `n − half_width ..= n + half_width`:
///
/// * `e^{iφ}`: `e^{−inφ} exp(iλe^{iφ})`
/// * `cos φ`: `e^{−inφ} e^{−λ sin φ}`
/// * `sin φ`: `e^{−inφ} e^{λ cos φ}`
pub fn candidate_spectrum(f1: PhaseFunction, lambda: Complex64, n: usize, half_width: usize) -> Result<Spectrum> {
    check_nogo_kind(f1)?;
    let norm = candidate_norm_sqr(f1, lambda)?.sqrt();
    let (n, w) = (n as i64, half_width as i64);
    let coeffs = (n - w..=n + w)
        .map(|idx| candidate_coefficient(f1, lambda, n - idx).map(|c| c / norm))
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum::new(n - w, coeffs))
}

/// Unnormalized magnitudes of the forbidden coefficients at indices
/// `−1, −2, …, −kmax` (i.e. `m = n + k`).
pub fn forbidden_coefficients(f1: PhaseFunction, lambda: Complex64, n: usize, kmax: usize) -> Result<Vec<f64>> {
    check_nogo_kind(f1)?;
    (1..=kmax)
        .map(|k| candidate_coefficient(f1, lambda, (n + k) as i64).map(|c| c.norm()))
        .collect()
}

/// Normalized weight of the analytic solution on the forbidden modes
/// `e^{+ikφ}`, `k ≥ 1`.
pub fn forbidden_mass(f1: PhaseFunction, lambda: Complex64, n: usize) -> Result<f64> {
    check_nogo_kind(f1)?;
    let norm = candidate_norm_sqr(f1, lambda)?;
    let mut total = 0.0;
    let mut m = n as i64 + 1;
    loop {
        let t = candidate_coefficient(f1, lambda, m)?.norm_sqr();
        total += t;
        if ((m as f64) > lambda.norm() && t <= 1e-18 * total) || t == 0.0 || m > n as i64 + 400 {
            break;
        }
        m += 1;
    }
    Ok(total / norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NogoEntry {
    pub lambda: Complex64,
    pub n: usize,
    pub violation: f64,
    /// Largest forbidden coefficient magnitude among `k = 1..=10`.
    pub max_forbidden: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NogoReport {
    pub f1: PhaseFunction,
    pub delta: f64,
    pub excluded: usize,
    pub entries: Vec<NogoEntry>,
    pub min_violation: f64,
    pub argmin: NogoEntry,
}

/// For every `λ` with `|λ| ≥ delta` and every base number `0..=n_max`,
/// measures how much of the analytic solution sits on forbidden modes.
pub fn scan_intelligent_nogo(
    f1: PhaseFunction,
    lambda_grid: &[Complex64],
    n_max: usize,
    delta: f64,
) -> Result<NogoReport> {
    check_nogo_kind(f1)?;
    if !(delta >= 0.0) {
        return domain(format!("exclusion radius must be nonnegative, got {delta}"));
    }
    let kept: Vec<Complex64> = lambda_grid.iter().copied().filter(|l| l.norm() >= delta).collect();
    if kept.is_empty() {
        return domain("λ grid is empty after excluding the neighbourhood of 0");
    }
    let entries: Vec<NogoEntry> = kept
        .par_iter()
        .flat_map_iter(|&lambda| (0..=n_max).map(move |n| (lambda, n)))
        .map(|(lambda, n)| -> Result<NogoEntry> {
            let violation = forbidden_mass(f1, lambda, n)?;
            let max_forbidden = forbidden_coefficients(f1, lambda, n, 10)?.into_iter().fold(0.0, f64::max);
            Ok(NogoEntry { lambda, n, violation, max_forbidden })
        })
        .collect::<Result<Vec<_>>>()?;
    let argmin = *entries
        .iter()
        .min_by(|a, b| a.violation.total_cmp(&b.violation))
        .expect("nonempty");
    Ok(NogoReport {
        f1,
        delta,
        excluded: lambda_grid.len() - kept.len(),
        min_violation: argmin.violation,
        argmin,
        entries,
    })
}

/// `points` values of `λ` evenly spaced on the circle of the given radius.
pub fn lambda_circle(radius: f64, points: usize) -> Vec<Complex64> {
    (0..points)
        .map(|j| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * j as f64 / points as f64))
        .collect()
}
