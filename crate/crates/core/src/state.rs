//! Pure states of a single mode on a truncated Fock space.
//!
//! A state is stored as the amplitudes `c_0 ..= c_N` of `|ψ⟩ = Σ c_n |n⟩`.
//! Its phase wave function is the finite Fourier sum
//! `ψ(φ) = (2π)^{-1/2} Σ c_n e^{-inφ}`; indexing from `n = 0` means a
//! stored state can never carry positive-frequency components.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, PhaseLabError, Result};

/// Default truncation order.
pub const DEFAULT_N_TRUNC: usize = 64;

/// Default number of grid points for sup-norm distances.
pub const DEFAULT_SUP_GRID: usize = 4096;

/// Tolerance on `Σ|c_n|² = 1` used by normalization checks.
pub const NORM_TOL: f64 = 1e-12;

const SUPPORT_EPS: f64 = 1e-14;

/// Coefficient vector `c_0 ..= c_N` of a single-mode state.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coeffs: Vec<Complex64>,
}

impl FockVector {
    /// Wraps raw amplitudes without normalizing them.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return domain("a state needs at least one amplitude");
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return domain("amplitudes must be finite");
        }
        Ok(Self { coeffs })
    }

    /// Builds a state from amplitudes and rescales it to unit norm.
    pub fn normalized_from(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::from_coeffs(coeffs)?.normalize()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Highest photon number kept.
    pub fn n_trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Returns the state rescaled to unit norm.
    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(PhaseLabError::Degenerate("zero vector cannot be normalized".into()));
        }
        let mut coeffs: Vec<Complex64> = self.coeffs.iter().map(|c| c / norm).collect();
        // second pass removes the residual rounding of the first division
        let renorm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        coeffs.iter_mut().for_each(|c| *c /= renorm);
        Ok(Self { coeffs })
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn ensure_normalized(&self, tol: f64) -> Result<()> {
        if self.is_normalized(tol) {
            Ok(())
        } else {
            Err(PhaseLabError::NotNormalized { norm_sqr: self.norm_sqr() })
        }
    }

    /// Photon numbers carrying non-negligible amplitude.
    pub fn support(&self) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > SUPPORT_EPS)
            .map(|(n, _)| n)
            .collect()
    }

    /// Phase wave function `ψ(φ)`, evaluated by Horner's rule in `e^{-iφ}`.
    pub fn psi(&self, phi: f64) -> Complex64 {
        let w = Complex64::from_polar(1.0, -phi);
        let acc = self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c);
        acc / (2.0 * PI).sqrt()
    }

    /// Same state with every amplitude multiplied by `e^{-inδ}`, i.e.
    /// `ψ(φ) → ψ(φ + δ)`.
    pub fn rotated(&self, delta: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * Complex64::from_polar(1.0, -(n as f64) * delta))
            .collect();
        Self { coeffs }
    }

    /// Embeds the state into a larger truncation by zero padding.
    pub fn padded(&self, n_trunc: usize) -> Result<Self> {
        if n_trunc < self.n_trunc() {
            return Err(PhaseLabError::Dimension { left: self.n_trunc(), right: n_trunc });
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n_trunc + 1, Complex64::new(0.0, 0.0));
        Ok(Self { coeffs })
    }

    /// Closest Fock vector up to a global phase: returns `(n, distance)` where
    /// `distance = min_θ ‖c − e^{iθ}|n⟩‖ = sqrt(2 − 2|c_n|)` for a unit vector.
    pub fn nearest_fock(&self) -> (usize, f64) {
        let (n, amp) = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| (n, c.norm()))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        (n, (2.0 - 2.0 * amp).max(0.0).sqrt())
    }

    /// 64-bit FNV-1a hash of the coefficient bit patterns, as 16 hex digits.
    /// Identifies the input state in reports.
    pub fn digest(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for c in &self.coeffs {
            for byte in c.re.to_bits().to_le_bytes().into_iter().chain(c.im.to_bits().to_le_bytes()) {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        format!("{h:016x}")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&StateFile::from(self)).expect("state serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile =
            serde_json::from_str(text).map_err(|e| PhaseLabError::Format(e.to_string()))?;
        file.try_into()
    }
}

/// On-disk form: `{ "n_trunc": N, "coeffs": [[re, im], ...] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub n_trunc: usize,
    pub coeffs: Vec<[f64; 2]>,
}

impl From<&FockVector> for StateFile {
    fn from(state: &FockVector) -> Self {
        Self {
            n_trunc: state.n_trunc(),
            coeffs: state.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl TryFrom<StateFile> for FockVector {
    type Error = PhaseLabError;

    fn try_from(file: StateFile) -> Result<Self> {
        if file.coeffs.len() != file.n_trunc + 1 {
            return Err(PhaseLabError::Format(format!(
                "n_trunc = {} requires {} coefficients, found {}",
                file.n_trunc,
                file.n_trunc + 1,
                file.coeffs.len()
            )));
        }
        FockVector::from_coeffs(file.coeffs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
            .map_err(|e| PhaseLabError::Format(e.to_string()))
    }
}

impl Serialize for FockVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StateFile::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FockVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let file = StateFile::deserialize(deserializer)?;
        FockVector::try_from(file).map_err(serde::de::Error::custom)
    }
}

/// Sup-norm distance between two phase wave functions.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct SupNormDistance(f64);

impl SupNormDistance {
    pub fn value(self) -> f64 {
        self.0
    }
}

fn zero_vec(n_trunc: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); n_trunc + 1]
}

fn check_index(index: usize, n_trunc: usize) -> Result<()> {
    if index > n_trunc {
        Err(PhaseLabError::Index { index, n_trunc })
    } else {
        Ok(())
    }
}

/// Number eigenstate `|n⟩`.
pub fn make_fock_state(n: usize, n_trunc: usize) -> Result<FockVector> {
    check_index(n, n_trunc)?;
    let mut coeffs = zero_vec(n_trunc);
    coeffs[n] = Complex64::new(1.0, 0.0);
    FockVector::from_coeffs(coeffs)
}

/// `ψ(φ) = (4π)^{-1/2} e^{iα} (e^{-ikφ} + e^{iβ} e^{-iℓφ})` with `|ℓ − k| ≥ 2`.
pub fn make_two_mode_superposition(
    k: usize,
    l: usize,
    alpha: f64,
    beta: f64,
    n_trunc: usize,
) -> Result<FockVector> {
    check_index(k, n_trunc)?;
    check_index(l, n_trunc)?;
    if k.abs_diff(l) < 2 {
        return domain(format!("two-mode superposition needs |ℓ − k| ≥ 2, got k = {k}, ℓ = {l}"));
    }
    let mut coeffs = zero_vec(n_trunc);
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    coeffs[k] = Complex64::from_polar(amp, alpha);
    coeffs[l] = Complex64::from_polar(amp, alpha + beta);
    FockVector::from_coeffs(coeffs)
}

fn two_mode_support(state: &FockVector) -> Result<(usize, usize)> {
    match state.support().as_slice() {
        [k, l] => Ok((*k, *l)),
        other => domain(format!("expected a two-mode superposition, support is {other:?}")),
    }
}

fn check_epsilon_half_open(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        domain(format!("ε must lie in (0, 1], got {eps}"))
    }
}

/// Adds `√ε |m⟩` to `√(1−ε) |ψ⟩` and renormalizes. When `m` lies outside the
/// support of `ψ` the two parts are orthogonal and no rescaling is needed.
pub fn mix_with_fock(state: &FockVector, m: usize, eps: f64, phase: f64) -> Result<FockVector> {
    check_index(m, state.n_trunc())?;
    if !(0.0..=1.0).contains(&eps) {
        return domain(format!("ε must lie in [0, 1], got {eps}"));
    }
    let keep = (1.0 - eps).sqrt();
    let mut coeffs: Vec<Complex64> = state.coeffs().iter().map(|c| c * keep).collect();
    coeffs[m] += Complex64::from_polar(eps.sqrt(), phase);
    FockVector::normalized_from(coeffs)
}

/// Mixes a two-mode state `k < ℓ` with an intermediate mode `k < m < ℓ`.
pub fn perturb_intermediate(state: &FockVector, m: usize, eps: f64) -> Result<FockVector> {
    let (k, l) = two_mode_support(state)?;
    check_epsilon_half_open(eps)?;
    if !(k < m && m < l) {
        return domain(format!("intermediate mode must satisfy {k} < m < {l}, got m = {m}"));
    }
    mix_with_fock(state, m, eps, 0.0)
}

/// Mixes a two-mode state `k < ℓ` with a mode `m > ℓ + 1` above the support.
pub fn perturb_above(state: &FockVector, m: usize, eps: f64) -> Result<FockVector> {
    let (_, l) = two_mode_support(state)?;
    check_epsilon_half_open(eps)?;
    if m <= l + 1 {
        return domain(format!("upper mode must satisfy m > {}, got m = {m}", l + 1));
    }
    mix_with_fock(state, m, eps, 0.0)
}

/// `ψ″ = (2π)^{-1/2} (√(1−ε) e^{-inφ} + √ε e^{-i(n+1)φ})`, `0 < ε < 1`.
pub fn perturb_neighbor(n: usize, eps: f64, n_trunc: usize) -> Result<FockVector> {
    check_index(n + 1, n_trunc)?;
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("ε must lie in (0, 1), got {eps}"));
    }
    let mut coeffs = zero_vec(n_trunc);
    coeffs[n] = Complex64::new((1.0 - eps).sqrt(), 0.0);
    coeffs[n + 1] = Complex64::new(eps.sqrt(), 0.0);
    FockVector::from_coeffs(coeffs)
}

/// Maximum of `|ψ_a(φ) − ψ_b(φ)|` over a uniform grid on `[−π, π)`.
pub fn sup_norm_distance(a: &FockVector, b: &FockVector, grid_size: usize) -> Result<SupNormDistance> {
    if a.n_trunc() != b.n_trunc() {
        return Err(PhaseLabError::Dimension { left: a.n_trunc(), right: b.n_trunc() });
    }
    if grid_size < 256 {
        return domain(format!("sup-norm grid needs at least 256 points, got {grid_size}"));
    }
    let diff = FockVector {
        coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
    };
    let h = 2.0 * PI / grid_size as f64;
    let value = (0..grid_size)
        .map(|j| diff.psi(-PI + j as f64 * h).norm())
        .fold(0.0, f64::max);
    Ok(SupNormDistance(value))
}

/// Upper bound on the sup-norm distance between a two-mode state and its
/// intermediate-mode perturbation of strength `ε`.
pub fn intermediate_perturbation_bound(eps: f64) -> f64 {
    (eps / (2.0 * PI)).sqrt() * ((2.0 * eps).sqrt() / (1.0 + (1.0 - eps).sqrt()) + 1.0)
}

/// Normalized state with i.i.d. complex Gaussian amplitudes.
pub fn random_state<R: Rng + ?Sized>(n_trunc: usize, rng: &mut R) -> FockVector {
    let coeffs: Vec<Complex64> = (0..=n_trunc)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    FockVector::normalized_from(coeffs).expect("a Gaussian vector is almost surely nonzero")
}

/// Reproducible random state: stream `index` of the ChaCha8 generator seeded
/// with `seed`. Independent of evaluation order, so sweeps may run in parallel.
pub fn seeded_random_state(n_trunc: usize, seed: u64, index: u64) -> FockVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    random_state(n_trunc, &mut rng)
}
