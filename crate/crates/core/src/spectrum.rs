//! Finite Fourier sums over an arbitrary integer index window.
//!
//! A [`Spectrum`] stores `d_lo ..= d_hi` for the function
//! `g(φ) = (2π)^{-1/2} Σ_n d_n e^{-inφ}`. Multiplying by `e^{±iφ}` and applying
//! functions of `i∂/∂φ` act exactly on the coefficients, and
//! `∫ g* h dφ = Σ d_g* d_h`. Indices below zero are the positive-frequency
//! modes `e^{+ikφ}` that no photon state may contain.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::state::FockVector;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    lo: i64,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(lo: i64, coeffs: Vec<Complex64>) -> Self {
        Self { lo, coeffs }
    }

    pub fn from_state(state: &FockVector) -> Self {
        Self { lo: 0, coeffs: state.coeffs().to_vec() }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest stored index (`lo − 1` when empty).
    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn get(&self, n: i64) -> Complex64 {
        if n < self.lo || n > self.hi() {
            ZERO
        } else {
            self.coeffs[(n - self.lo) as usize]
        }
    }

    /// Multiplication by `e^{-i·by·φ}`: index `n` moves to `n + by`.
    pub fn shifted(&self, by: i64) -> Self {
        Self { lo: self.lo + by, coeffs: self.coeffs.clone() }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self { lo: self.lo, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Pointwise `d_n → w(n) d_n`; realizes `w(i∂/∂φ)`.
    pub fn weighted<F: Fn(i64) -> Complex64>(&self, w: F) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * w(self.lo + j as i64))
            .collect();
        Self { lo: self.lo, coeffs }
    }

    /// `self + s · other` over the union of both windows.
    pub fn axpy(&self, s: Complex64, other: &Spectrum) -> Self {
        if self.coeffs.is_empty() {
            return other.scaled(s);
        }
        if other.coeffs.is_empty() {
            return self.clone();
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let coeffs = (lo..=hi).map(|n| self.get(n) + s * other.get(n)).collect();
        Self { lo, coeffs }
    }

    pub fn add(&self, other: &Spectrum) -> Self {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    /// `∫ self* other dφ`.
    pub fn inner(&self, other: &Spectrum) -> Complex64 {
        let lo = self.lo.max(other.lo);
        let hi = self.hi().min(other.hi());
        (lo..=hi).map(|n| self.get(n).conj() * other.get(n)).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Energy in the modes `e^{+ikφ}`, `k ≥ 1`.
    pub fn positive_frequency_energy(&self) -> f64 {
        (self.lo..0).map(|n| self.get(n).norm_sqr()).sum()
    }

    /// Coefficients on `0 ..= n_trunc`, i.e. the orthogonal projection onto the
    /// truncated Fock space.
    pub fn project(&self, n_trunc: usize) -> Vec<Complex64> {
        (0..=n_trunc as i64).map(|n| self.get(n)).collect()
    }

    pub fn eval(&self, phi: f64) -> Complex64 {
        let sum: Complex64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * Complex64::from_polar(1.0, -((self.lo + j as i64) as f64) * phi))
            .sum();
        sum / (2.0 * PI).sqrt()
    }
}
