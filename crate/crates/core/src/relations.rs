//! Robertson–Schrödinger, Heisenberg–Robertson and Trifonov relations for a
//! function of the phase paired with the photon number.
//!
//! For `δF₁ψ = (f₁ − ⟨f₁⟩)ψ` and `δF₂ψ = (f₂(n) − ⟨f₂⟩)ψ` the Hermitian matrix
//! `F_{μν} = ⟨δF_μψ, δF_νψ⟩` bounds
//!
//! * RS: `F₁₁F₂₂ ≥ |F₁₂|²`
//! * HR: `F₁₁F₂₂ ≥ (Im F₁₂)²`
//! * Trifonov: `F₁₁ + F₂₂ ≥ 2|Im F₁₂|`

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::phase::{
    apply_phi_power, delta_spectrum, number_moments, wrapped_phase_variance, PhaseFunction,
    WrappedVarianceResult,
};
use crate::spectrum::Spectrum;
use crate::state::FockVector;

/// Absolute tolerance on a gap for a relation to count as saturated.
pub const SATURATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FMatrix {
    pub f11: f64,
    pub f22: f64,
    pub f12: Complex64,
}

impl FMatrix {
    /// Symmetric part `a₁₂`.
    pub fn a12(&self) -> f64 {
        self.f12.re
    }

    /// Antisymmetric part `b₁₂`.
    pub fn b12(&self) -> f64 {
        self.f12.im
    }

    pub fn det_a(&self) -> f64 {
        self.f11 * self.f22 - self.a12() * self.a12()
    }

    pub fn det_b(&self) -> f64 {
        self.b12() * self.b12()
    }

    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        self.f11 >= -tol && self.f22 >= -tol && self.f11 * self.f22 - self.f12.norm_sqr() >= -tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub f: FMatrix,
    pub var1: f64,
    pub var2: f64,
    pub rs_rhs: f64,
    pub hr_rhs: f64,
    pub tri_rhs: f64,
    pub rs_gap: f64,
    pub hr_gap: f64,
    pub tri_gap: f64,
    pub rs_saturated: bool,
    pub hr_saturated: bool,
    pub tri_saturated: bool,
}

impl UncertaintyReport {
    fn new(f: FMatrix, rs_rhs: f64, hr_rhs: f64, tri_rhs: f64) -> Self {
        let (var1, var2) = (f.f11, f.f22);
        let rs_gap = var1 * var2 - rs_rhs;
        let hr_gap = var1 * var2 - hr_rhs;
        let tri_gap = var1 + var2 - tri_rhs;
        Self {
            f,
            var1,
            var2,
            rs_rhs,
            hr_rhs,
            tri_rhs,
            rs_gap,
            hr_gap,
            tri_gap,
            rs_saturated: rs_gap.abs() <= SATURATION_TOL,
            hr_saturated: hr_gap.abs() <= SATURATION_TOL,
            tri_saturated: tri_gap.abs() <= SATURATION_TOL,
        }
    }

    fn from_f(f: FMatrix) -> Self {
        let b = f.b12();
        Self::new(f, f.f12.norm_sqr(), b * b, 2.0 * b.abs())
    }

    /// Smallest of the three gaps.
    pub fn min_gap(&self) -> f64 {
        self.rs_gap.min(self.hr_gap).min(self.tri_gap)
    }

    pub fn csv_header() -> &'static str {
        "var1,var2,rs_rhs,hr_rhs,tri_rhs,rs_gap,hr_gap,tri_gap"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            self.var1, self.var2, self.rs_rhs, self.hr_rhs, self.tri_rhs, self.rs_gap, self.hr_gap, self.tri_gap
        )
    }
}

/// `F` for `f₁` and `f₂ = n`.
pub fn build_f_matrix(state: &FockVector, f1: PhaseFunction) -> FMatrix {
    build_f_matrix_with(state, f1, |n| n as f64)
}

/// `F` for `f₁` and an arbitrary real function `f₂(n)` of the photon number.
/// The wrapped phase is measured in the optimally shifted frame `ψ̃`.
pub fn build_f_matrix_with<F: Fn(usize) -> f64>(state: &FockVector, f1: PhaseFunction, f2: F) -> FMatrix {
    match f1 {
        PhaseFunction::WrappedPhi => {
            let w = wrapped_phase_variance(state);
            wrapped_f_matrix(state, &w, f2)
        }
        _ => {
            let d1 = delta_spectrum(state, f1).expect("Fourier-supported kind");
            let d2 = delta_number_spectrum(state, &f2);
            FMatrix { f11: d1.norm_sqr(), f22: d2.norm_sqr(), f12: d1.inner(&d2) }
        }
    }
}

fn delta_number_spectrum<F: Fn(usize) -> f64>(state: &FockVector, f2: &F) -> Spectrum {
    let c = state.coeffs();
    let mean: f64 = c.iter().enumerate().map(|(n, a)| f2(n) * a.norm_sqr()).sum();
    Spectrum::new(0, c.iter().enumerate().map(|(n, a)| a * (f2(n) - mean)).collect())
}

fn wrapped_f_matrix<F: Fn(usize) -> f64>(state: &FockVector, w: &WrappedVarianceResult, f2: F) -> FMatrix {
    let shifted = state.rotated(w.gamma0);
    let d2 = delta_number_spectrum(&shifted, &f2);
    let n = shifted.n_trunc() as i64;
    let phi_c = Spectrum::new(0, apply_phi_power(shifted.coeffs(), 1, 0..=n).expect("order 1"));
    FMatrix { f11: w.variance, f22: d2.norm_sqr(), f12: phi_c.inner(&d2) }
}

pub fn evaluate_relations(state: &FockVector, f1: PhaseFunction) -> UncertaintyReport {
    UncertaintyReport::from_f(build_f_matrix(state, f1))
}

/// Relations for the wrapped phase and the photon number, with the
/// right-hand sides written through the boundary value `ψ̃(π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseNumberReport {
    pub report: UncertaintyReport,
    pub gamma0: f64,
    /// `⟨φ⟩` in the shifted frame (zero at an exact minimum).
    pub mean_phi: f64,
    pub mean_n: f64,
    /// `2π|ψ̃(π)|²`.
    pub boundary_density: f64,
    /// `(i/2)∫(ψ̃*φψ̃′ − ψ̃φψ̃′*) dφ`.
    pub second_bracket: f64,
    /// `F̃₁₂` evaluated directly from matrix elements.
    pub f12_direct: Complex64,
}

/// `ψ̃(π) = (2π)^{-1/2} Σ c̃ₙ(−1)ⁿ`.
pub fn shifted_psi_at_pi(state: &FockVector, gamma0: f64) -> Complex64 {
    state.rotated(gamma0).psi(PI)
}

/// `A = ∫ ψ̃* φ ψ̃′ dφ` via matrix elements.
fn phi_derivative_moment(shifted: &FockVector) -> Complex64 {
    let c = shifted.coeffs();
    let dc: Vec<Complex64> = c
        .iter()
        .enumerate()
        .map(|(l, a)| a * Complex64::new(0.0, -(l as f64)))
        .collect();
    let n = shifted.n_trunc() as i64;
    let phi_dc = apply_phi_power(&dc, 1, 0..=n).expect("order 1");
    c.iter().zip(&phi_dc).map(|(a, b)| a.conj() * b).sum()
}

pub fn evaluate_phase_number_relations(state: &FockVector) -> PhaseNumberReport {
    let w = wrapped_phase_variance(state);
    let shifted = state.rotated(w.gamma0);
    let nm = number_moments(state);
    let boundary_density = 2.0 * PI * shifted.psi(PI).norm_sqr();
    let second_bracket = -phi_derivative_moment(&shifted).im;
    let f_direct = wrapped_f_matrix(state, &w, |n| n as f64);

    let half = 0.5 * (1.0 - boundary_density);
    let hr_rhs = half * half;
    // the bracket assumes ⟨φ⟩̃ = 0; the −⟨n⟩⟨φ⟩̃ term restores the exact cross term
    let re_f12 = second_bracket - nm.mean * w.stationarity_residual;
    let rs_rhs = hr_rhs + re_f12 * re_f12;
    let tri_rhs = (1.0 - boundary_density).abs();
    let f = FMatrix { f11: w.variance, f22: nm.variance, f12: Complex64::new(re_f12, -half) };
    PhaseNumberReport {
        report: UncertaintyReport::new(f, rs_rhs, hr_rhs, tri_rhs),
        gamma0: w.gamma0,
        mean_phi: w.stationarity_residual,
        mean_n: nm.mean,
        boundary_density,
        second_bracket,
        f12_direct: f_direct.f12,
    }
}

/// The second bracket `−∫ φ Im(ψ̃*ψ̃′) dφ` by the composite trapezoid rule on
/// `intervals` subintervals of the closed interval `[−π, π]`.
pub fn second_bracket_trapezoid(state: &FockVector, gamma0: f64, intervals: usize) -> f64 {
    let shifted = state.rotated(gamma0);
    let c = shifted.coeffs();
    let dspec = Spectrum::new(
        0,
        c.iter().enumerate().map(|(l, a)| a * Complex64::new(0.0, -(l as f64))).collect(),
    );
    let g = |phi: f64| -phi * (shifted.psi(phi).conj() * dspec.eval(phi)).im;
    let h = 2.0 * PI / intervals as f64;
    let inner: f64 = (1..intervals).map(|j| g(-PI + j as f64 * h)).sum();
    h * (inner + 0.5 * (g(-PI) + g(PI)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{make_fock_state, make_two_mode_superposition, seeded_random_state};
    use proptest::prelude::*;

    fn intelligent(lambda: Complex64, n: usize, n_trunc: usize) -> FockVector {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n_trunc + 1];
        let mut term = Complex64::new(1.0, 0.0);
        for k in 0..=(n_trunc - n) {
            if k > 0 {
                term *= Complex64::new(0.0, -1.0) * lambda / k as f64;
            }
            coeffs[n + k] = term;
        }
        FockVector::normalized_from(coeffs).unwrap()
    }

    const BESSEL_RATIO_2: f64 = 0.697774657964007;

    #[test]
    fn number_state_with_exp() {
        let f = build_f_matrix(&make_fock_state(3, 6).unwrap(), PhaseFunction::ExpMinus);
        assert!((f.f11 - 1.0).abs() < 1e-15);
        assert_eq!(f.f22, 0.0);
        assert_eq!(f.f12, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn intelligent_state_saturates_rs() {
        let s = intelligent(Complex64::new(1.0, 0.0), 0, 48);
        let f = build_f_matrix(&s, PhaseFunction::ExpMinus);
        assert!((f.f12.norm_sqr() - f.f11 * f.f22).abs() < 1e-12);
        // (Im F₁₂)² = (Re λ)²(1 − r²)²
        let expected = (1.0 - BESSEL_RATIO_2 * BESSEL_RATIO_2).powi(2);
        assert!((f.b12() * f.b12() - expected).abs() < 1e-12);
        let r = evaluate_relations(&s, PhaseFunction::ExpMinus);
        assert!(r.tri_gap.abs() < 1e-9 && r.tri_saturated);
        assert!(r.rs_saturated && r.hr_saturated);
    }

    #[test]
    fn number_state_with_cos_is_not_trifonov() {
        let r = evaluate_relations(&make_fock_state(2, 5).unwrap(), PhaseFunction::CosPhi);
        assert!((r.var1 + r.var2 - 0.5).abs() < 1e-15);
        assert_eq!(r.tri_rhs, 0.0);
        assert!((r.tri_gap - 0.5).abs() < 1e-15);
        assert!(!r.tri_saturated);
    }

    #[test]
    fn number_state_phase_relations() {
        let p = evaluate_phase_number_relations(&make_fock_state(4, 8).unwrap());
        assert!((p.boundary_density - 1.0).abs() < 1e-14);
        assert!(p.report.hr_rhs < 1e-28 && p.report.rs_rhs < 1e-28);
        assert_eq!(p.report.var2, 0.0);
        assert!(p.report.rs_gap.abs() < 1e-14);
        assert!(p.report.tri_rhs < 1e-14);
        assert!((p.report.var1 + p.report.var2 - PI * PI / 3.0).abs() < 1e-13);
        assert!(!p.report.tri_saturated);
    }

    #[test]
    fn boundary_identity_reproduces_cross_term() {
        for seed in 0..10 {
            let s = seeded_random_state(16, seed, 2);
            let p = evaluate_phase_number_relations(&s);
            assert!((p.report.f.f12 - p.f12_direct).norm() < 1e-10, "seed {seed}");
        }
        let s = make_two_mode_superposition(1, 4, 0.0, 0.3, 6).unwrap();
        let p = evaluate_phase_number_relations(&s);
        assert!((p.report.f.f12 - p.f12_direct).norm() < 1e-10);
    }

    #[test]
    fn trapezoid_bracket_converges() {
        let s = seeded_random_state(10, 5, 0);
        let p = evaluate_phase_number_relations(&s);
        let coarse = second_bracket_trapezoid(&s, p.gamma0, 64);
        let fine = second_bracket_trapezoid(&s, p.gamma0, 4096);
        assert!((fine - p.second_bracket).abs() < 1e-6);
        assert!((fine - p.second_bracket).abs() < (coarse - p.second_bracket).abs());
    }

    #[test]
    fn f12_matches_quadrature_for_cos() {
        use crate::quadrature::simpson_periodic;
        let s = seeded_random_state(12, 9, 0);
        let f = build_f_matrix(&s, PhaseFunction::CosPhi);
        let mean_cos = crate::phase::expect_phase_function(&s, PhaseFunction::CosPhi).re;
        let nm = number_moments(&s);
        let d2: Vec<Complex64> = s.coeffs().iter().enumerate().map(|(n, a)| a * (n as f64 - nm.mean)).collect();
        let d2s = Spectrum::new(0, d2);
        let q = simpson_periodic(1024, |phi| (phi.cos() - mean_cos) * s.psi(phi).conj() * d2s.eval(phi));
        assert!((q - f.f12).norm() < 1e-12);
    }

    #[test]
    fn generic_f2_square() {
        let s = seeded_random_state(6, 1, 0);
        let f = build_f_matrix_with(&s, PhaseFunction::ExpMinus, |n| (n * n) as f64);
        let p: Vec<f64> = s.coeffs().iter().map(|c| c.norm_sqr()).collect();
        let m1: f64 = p.iter().enumerate().map(|(n, w)| (n * n) as f64 * w).sum();
        let m2: f64 = p.iter().enumerate().map(|(n, w)| (n * n * n * n) as f64 * w).sum();
        assert!((f.f22 - (m2 - m1 * m1)).abs() < 1e-9 * m2);
        assert!(f.is_positive_semidefinite(1e-12));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn relations_hold_on_random_states(seed in 0u64..100_000, n in 1usize..32) {
            let s = seeded_random_state(n, seed, 0);
            for f1 in PhaseFunction::ALL {
                let r = evaluate_relations(&s, f1);
                prop_assert!(r.min_gap() >= -1e-10, "{:?}: {:?}", f1, r);
                prop_assert!(r.rs_rhs >= r.hr_rhs);
                prop_assert!(r.f.det_a() >= r.f.det_b() - 1e-10);
                prop_assert!(r.var1 * r.var2 >= r.f.det_b() - 1e-10);
                prop_assert!(r.f.det_a() <= r.var1 * r.var2 + 1e-12);
            }
            let p = evaluate_phase_number_relations(&s);
            prop_assert!(p.report.min_gap() >= -1e-9);
        }
    }
}
