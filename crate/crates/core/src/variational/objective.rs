//! Products and sums of variances as functions on the unit sphere, with their
//! gradients and the residuals of the associated Euler–Lagrange equations.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, PhaseLabError, Result};
use crate::phase::{apply_phi_power, minimize_profile, phi_matrix_element, PhaseFunction, WrappedProfile};
use crate::spectrum::Spectrum;
use crate::state::FockVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `(Δf₁)²(Δn)²`
    Product,
    /// `(Δf₁)² + (Δn)²`
    Sum,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Product => "product",
            Mode::Sum => "sum",
        })
    }
}

impl FromStr for Mode {
    type Err = PhaseLabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "product" => Ok(Mode::Product),
            "sum" => Ok(Mode::Sum),
            other => domain(format!("unknown mode `{other}` (expected product or sum)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    pub value: f64,
    /// `(Δf₁)²`
    pub var1: f64,
    /// `(Δn)²`
    pub var2: f64,
    /// Optimal reference point when `f₁` is the wrapped phase.
    pub gamma0: Option<f64>,
}

/// Objective with its gradient `g` on coefficient space, normalized so that
/// `dF = Re Σ conj(g_n) dc_n` for tangent variations.
#[derive(Debug, Clone)]
pub(crate) struct Evaluation {
    pub value: ObjectiveValue,
    pub grad: Vec<Complex64>,
    /// Tangential part `g − Re⟨c, g⟩ c`.
    pub tangent: Vec<Complex64>,
}

impl Evaluation {
    pub fn tangent_norm(&self) -> f64 {
        self.tangent.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Norm of the truncated Euler–Lagrange equation, scaled like the
    /// stationarity residuals below.
    pub fn residual(&self, mode: Mode) -> f64 {
        let t = self.tangent_norm();
        match mode {
            Mode::Sum => 0.5 * t,
            Mode::Product if self.value.var1 > 0.0 => 0.5 * t / self.value.var1,
            Mode::Product => 0.5 * t,
        }
    }
}

fn number_part(c: &[Complex64]) -> (f64, f64, Vec<Complex64>) {
    let mean: f64 = c.iter().enumerate().map(|(n, a)| n as f64 * a.norm_sqr()).sum();
    let var: f64 = c.iter().enumerate().map(|(n, a)| (n as f64 - mean).powi(2) * a.norm_sqr()).sum();
    let grad = c
        .iter()
        .enumerate()
        .map(|(n, a)| a * (2.0 * (n as f64 - mean).powi(2)))
        .collect();
    (mean, var, grad)
}

/// `(Δf₁)²` and `2P|f₁ − ⟨f₁⟩|²ψ` (or its wrapped-phase analogue).
fn phase_part(c: &[Complex64], f1: PhaseFunction) -> (f64, Vec<Complex64>, Option<f64>) {
    let n = c.len();
    match f1 {
        PhaseFunction::WrappedPhi => {
            let w = minimize_profile(&WrappedProfile::new(c));
            let g0 = w.gamma0;
            let shifted: Vec<Complex64> = c
                .iter()
                .enumerate()
                .map(|(k, a)| a * Complex64::from_polar(1.0, -(k as f64) * g0))
                .collect();
            let m2 = apply_phi_power(&shifted, 2, 0..=(n as i64 - 1)).expect("order 2");
            let grad = m2
                .iter()
                .enumerate()
                .map(|(k, v)| 2.0 * v * Complex64::from_polar(1.0, k as f64 * g0))
                .collect();
            (w.variance, grad, Some(g0))
        }
        _ => {
            let psi = Spectrum::new(0, c.to_vec());
            let d = delta(&psi, f1);
            let var = d.norm_sqr();
            let dd = delta_adjoint(&psi, &d, f1);
            let grad = dd.project(n - 1).into_iter().map(|x| 2.0 * x).collect();
            (var, grad, None)
        }
    }
}

/// `(f − ⟨f⟩)ψ`.
fn delta(psi: &Spectrum, f1: PhaseFunction) -> Spectrum {
    let fpsi = f1.apply(psi).expect("Fourier-supported kind");
    let z = psi.inner(&fpsi);
    fpsi.axpy(-z, psi)
}

/// `(f − ⟨f⟩)* d`.
fn delta_adjoint(psi: &Spectrum, d: &Spectrum, f1: PhaseFunction) -> Spectrum {
    let fpsi = f1.apply(psi).expect("Fourier-supported kind");
    let z = psi.inner(&fpsi);
    f1.apply_conj(d).expect("Fourier-supported kind").axpy(-z.conj(), d)
}

pub(crate) fn evaluate(c: &[Complex64], f1: PhaseFunction, mode: Mode) -> Evaluation {
    let (v1, g1, gamma0) = phase_part(c, f1);
    let (_, v2, g2) = number_part(c);
    let (value, grad): (f64, Vec<Complex64>) = match mode {
        Mode::Product => (v1 * v2, g1.iter().zip(&g2).map(|(a, b)| a * v2 + b * v1).collect()),
        Mode::Sum => (v1 + v2, g1.iter().zip(&g2).map(|(a, b)| a + b).collect()),
    };
    let radial: f64 = c.iter().zip(&grad).map(|(a, g)| (a.conj() * g).re).sum();
    let tangent = grad.iter().zip(c).map(|(g, a)| g - a * radial).collect();
    Evaluation { value: ObjectiveValue { value, var1: v1, var2: v2, gamma0 }, grad, tangent }
}

/// Objective value at a state.
pub fn objective(state: &FockVector, f1: PhaseFunction, mode: Mode) -> ObjectiveValue {
    evaluate(state.coeffs(), f1, mode).value
}

/// Objective and its Riemannian gradient on the unit sphere.
pub fn objective_gradient(state: &FockVector, f1: PhaseFunction, mode: Mode) -> (ObjectiveValue, Vec<Complex64>) {
    let ev = evaluate(state.coeffs(), f1, mode);
    (ev.value, ev.tangent)
}

/// Central-difference approximation of the Riemannian gradient, perturbing
/// each real and imaginary coordinate by `h` and renormalizing.
pub fn finite_difference_gradient(state: &FockVector, f1: PhaseFunction, mode: Mode, h: f64) -> Vec<Complex64> {
    let c = state.coeffs();
    let eval_at = |k: usize, dir: Complex64, t: f64| {
        let mut v = c.to_vec();
        v[k] += dir * t;
        let s = FockVector::normalized_from(v).expect("nonzero");
        evaluate(s.coeffs(), f1, mode).value.value
    };
    let raw: Vec<Complex64> = (0..c.len())
        .map(|k| {
            let re = (eval_at(k, Complex64::new(1.0, 0.0), h) - eval_at(k, Complex64::new(1.0, 0.0), -h)) / (2.0 * h);
            let im = (eval_at(k, Complex64::new(0.0, 1.0), h) - eval_at(k, Complex64::new(0.0, 1.0), -h)) / (2.0 * h);
            Complex64::new(re, im)
        })
        .collect();
    // derivatives of F(c/|c|) are already tangential up to O(h²)
    raw
}

/// Extra rows kept explicitly on each side when a residual involves `φ²ψ̃`.
const WRAPPED_WINDOW: i64 = 256;

/// `‖[α(n − ⟨n⟩)² + β|f₁ − ⟨f₁⟩|² − σ]ψ‖` over the whole circle. For the
/// wrapped phase `|f₁ − ⟨f₁⟩|²` is `φ²` in the frame of `ψ̃`.
fn full_residual(state: &FockVector, f1: PhaseFunction, alpha: f64, beta: f64, sigma: f64) -> f64 {
    let c = state.coeffs();
    let mean: f64 = c.iter().enumerate().map(|(n, a)| n as f64 * a.norm_sqr()).sum();
    match f1 {
        PhaseFunction::WrappedPhi => {
            let w = minimize_profile(&WrappedProfile::new(c));
            let shifted = state.rotated(w.gamma0);
            let ct = shifted.coeffs();
            let top = ct.len() as i64 - 1;
            let rows = -WRAPPED_WINDOW..=top + WRAPPED_WINDOW;
            let m2 = apply_phi_power(ct, 2, rows.clone()).expect("order 2");
            let mut window_sq = 0.0;
            let mut m2_sq = 0.0;
            for (j, v) in rows.zip(&m2) {
                let base = if (0..=top).contains(&j) {
                    ct[j as usize] * (alpha * (j as f64 - mean).powi(2) - sigma)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                window_sq += (base + v * beta).norm_sqr();
                m2_sq += v.norm_sqr();
            }
            // ‖φ²ψ̃‖² = ⟨φ⁴⟩ exactly; the rows beyond the window carry the rest
            let r = crate::phase::autocorrelation(ct);
            let mut phi4 = phi_matrix_element(4, 0).expect("order 4").re * r[0].re;
            for (k, rk) in r.iter().enumerate().skip(1) {
                phi4 += 2.0 * (phi_matrix_element(4, k as i64).expect("order 4") * rk).re;
            }
            let tail = (phi4 - m2_sq).max(0.0);
            (window_sq + beta * beta * tail).sqrt()
        }
        _ => {
            let psi = Spectrum::from_state(state);
            let d = delta(&psi, f1);
            let dd = delta_adjoint(&psi, &d, f1);
            let number = psi.weighted(|n| Complex64::new(alpha * (n as f64 - mean).powi(2) - sigma, 0.0));
            number.axpy(Complex64::new(beta, 0.0), &dd).norm_sqr().sqrt()
        }
    }
}

/// `‖[(δF₂)†δF₂ + ((Δf₂)²/(Δf₁)²)(δF₁)†δF₁ − 2(Δf₂)²]ψ‖` with `f₂ = n`.
pub fn product_stationarity_residual(state: &FockVector, f1: PhaseFunction) -> Result<f64> {
    let ev = evaluate(state.coeffs(), f1, Mode::Product).value;
    if ev.var1 <= 1e-300 {
        return Err(PhaseLabError::Degenerate(format!(
            "(Δ{f1})² vanishes; number states are handled separately"
        )));
    }
    Ok(full_residual(state, f1, 1.0, ev.var2 / ev.var1, 2.0 * ev.var2))
}

/// `‖[(δF₁)†δF₁ + (δF₂)†δF₂ − ((Δf₁)² + (Δf₂)²)]ψ‖` with `f₂ = n`.
pub fn sum_stationarity_residual(state: &FockVector, f1: PhaseFunction) -> f64 {
    let ev = evaluate(state.coeffs(), f1, Mode::Sum).value;
    full_residual(state, f1, 1.0, 1.0, ev.var1 + ev.var2)
}

/// Lagrange multiplier `Re⟨ψ, g⟩ / 2` of the constrained problem; equals
/// `2(Δf₁)²(Δf₂)²` for the product and `(Δf₁)² + (Δf₂)²` for the sum.
pub fn lagrange_multiplier(state: &FockVector, f1: PhaseFunction, mode: Mode) -> f64 {
    let ev = evaluate(state.coeffs(), f1, mode);
    0.5 * state.coeffs().iter().zip(&ev.grad).map(|(a, g)| (a.conj() * g).re).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::{number_moments, phase_function_variance};
    use crate::state::{
        make_fock_state, make_two_mode_superposition, perturb_intermediate, perturb_neighbor, seeded_random_state,
    };
    use proptest::prelude::*;

    const KINDS: [PhaseFunction; 5] = PhaseFunction::ALL;

    #[test]
    fn objective_matches_observables() {
        let s = seeded_random_state(9, 4, 0);
        for f1 in KINDS {
            let v1 = phase_function_variance(&s, f1);
            let v2 = number_moments(&s).variance;
            let p = objective(&s, f1, Mode::Product);
            let q = objective(&s, f1, Mode::Sum);
            assert!((p.value - v1 * v2).abs() < 1e-12);
            assert!((q.value - (v1 + v2)).abs() < 1e-12);
        }
    }

    #[test]
    fn two_mode_state_is_stationary_for_product() {
        let s = make_two_mode_superposition(0, 2, 0.4, 1.1, 8).unwrap();
        assert!(product_stationarity_residual(&s, PhaseFunction::ExpMinus).unwrap() < 1e-9);
        for eps in [0.01, 0.1, 0.5, 0.99] {
            let p = perturb_intermediate(&s, 1, eps).unwrap();
            assert!(product_stationarity_residual(&p, PhaseFunction::ExpMinus).unwrap() > 1e-3);
        }
        // ε = 1 lands on the number state |1⟩, itself stationary
        let p = perturb_intermediate(&s, 1, 1.0).unwrap();
        assert!(product_stationarity_residual(&p, PhaseFunction::ExpMinus).unwrap() < 1e-12);
    }

    #[test]
    fn number_state_product_residual_is_degenerate_only_when_var1_vanishes() {
        let s = make_fock_state(2, 6).unwrap();
        assert_eq!(product_stationarity_residual(&s, PhaseFunction::ExpMinus).unwrap(), 0.0);
        assert_eq!(product_stationarity_residual(&s, PhaseFunction::WrappedPhi).unwrap(), 0.0);
    }

    #[test]
    fn neighbor_states_are_not_sum_stationary() {
        for eps in [0.05, 0.3, 0.5, 0.9] {
            let p = perturb_neighbor(0, eps, 8).unwrap();
            let q = objective(&p, PhaseFunction::ExpMinus, Mode::Sum);
            assert!((q.value - 1.0).abs() < 1e-14);
            assert!(sum_stationarity_residual(&p, PhaseFunction::ExpMinus) > 1e-3);
        }
        let fock = make_fock_state(0, 8).unwrap();
        assert!((objective(&fock, PhaseFunction::ExpMinus, Mode::Sum).value - 1.0).abs() < 1e-15);
        // the vacuum fails only through the forbidden e^{+iφ} component
        let r = sum_stationarity_residual(&fock, PhaseFunction::ExpMinus);
        assert!(r.is_finite());
    }

    #[test]
    fn multipliers_at_stationary_points() {
        let s = make_two_mode_superposition(1, 4, 0.0, 0.7, 8).unwrap();
        let v = objective(&s, PhaseFunction::ExpMinus, Mode::Product);
        assert!((lagrange_multiplier(&s, PhaseFunction::ExpMinus, Mode::Product) - 2.0 * v.value).abs() < 1e-12);
        let q = objective(&s, PhaseFunction::CosPhi, Mode::Sum);
        assert!((lagrange_multiplier(&s, PhaseFunction::CosPhi, Mode::Sum) - q.value).abs() < 1e-12);
    }

    #[test]
    fn wrapped_residual_window_and_tail() {
        // product residual of a generic state: window sum plus analytic tail
        // against a brute-force quadrature of the same function
        use crate::quadrature::romberg;
        use std::f64::consts::PI;
        let s = seeded_random_state(5, 21, 0);
        let v = objective(&s, PhaseFunction::WrappedPhi, Mode::Sum);
        let t = s.rotated(v.gamma0.unwrap());
        let nm = number_moments(&s);
        let num = Spectrum::new(
            0,
            t.coeffs().iter().enumerate().map(|(n, a)| a * (n as f64 - nm.mean).powi(2)).collect(),
        );
        let sigma = v.var1 + v.var2;
        let quad = romberg(-PI, PI, 4096, |phi| {
            (num.eval(phi) + (phi * phi - sigma) * t.psi(phi)).norm_sqr()
        })
        .sqrt();
        let exact = sum_stationarity_residual(&s, PhaseFunction::WrappedPhi);
        assert!((quad - exact).abs() < 1e-9, "{quad} vs {exact}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn gradient_matches_finite_differences(seed in 0u64..10_000, n in 2usize..16, kind in 0usize..5, sum in any::<bool>()) {
            let s = seeded_random_state(n, seed, 1);
            let f1 = KINDS[kind];
            let mode = if sum { Mode::Sum } else { Mode::Product };
            let (_, g) = objective_gradient(&s, f1, mode);
            let fd = finite_difference_gradient(&s, f1, mode, 1e-6);
            let err: f64 = g.iter().zip(&fd).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            let scale: f64 = g.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(err <= 1e-6 * scale, "{} {}: {} vs {}", f1, mode, err, scale);
        }
    }
}
