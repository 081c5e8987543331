//! Power-series special functions: modified Bessel `I_k`, `J_m(iλ)` for
//! complex `λ`, Kummer's `₁F₁`, and the even/odd parabolic-cylinder pair.
//!
//! Every evaluator either reaches the requested accuracy or returns
//! [`PhaseLabError::NonConvergence`]. Partial sums use Neumaier's compensated
//! summation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, PhaseLabError, Result};

/// Stopping rule shared by the series evaluators.
///
/// A series stops once its terms are decreasing and the bound on the
/// remaining tail is below `abs_tol` times a magnitude scale: the largest term
/// for the Bessel series, `max(1, |partial sum|)` for the Kummer series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesAccuracy {
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesAccuracy {
    fn default() -> Self {
        Self { abs_tol: 1e-14, max_terms: 500 }
    }
}

impl SeriesAccuracy {
    pub fn new(abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tol > 0.0) {
            return domain(format!("abs_tol must be positive, got {abs_tol}"));
        }
        if max_terms < 50 {
            return domain(format!("max_terms must be at least 50, got {max_terms}"));
        }
        Ok(Self { abs_tol, max_terms })
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct ComplexNeumaier {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexNeumaier {
    fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `Σ_j (z/2)^{2j+k} / (j! (j+k)!)` for complex `z`.
fn bessel_i_series(k: u32, z: Complex64, acc: SeriesAccuracy) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Ok(if k == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
    }
    let half = z / 2.0;
    let q = half * half;
    // leading term (z/2)^k / k!
    let mut term = (1..=k).fold(Complex64::new(1.0, 0.0), |t, i| t * half / i as f64);
    let mut sum = ComplexNeumaier::default();
    sum.add(term);
    // relative to the largest term, so tiny high-order values keep full precision
    let mut scale = term.norm();
    for j in 0..acc.max_terms {
        let denom = ((j + 1) as f64) * ((j as u32 + 1 + k) as f64);
        term *= q / denom;
        sum.add(term);
        scale = scale.max(term.norm());
        // once the term ratio r drops below 1 the tail is bounded by |t| r / (1 − r)
        let ratio = q.norm() / (((j + 2) as f64) * ((j as u32 + 2 + k) as f64));
        if ratio < 1.0 && term.norm() * ratio <= acc.abs_tol * scale * (1.0 - ratio) {
            return Ok(sum.value());
        }
    }
    Err(PhaseLabError::NonConvergence { what: "modified Bessel series", max_terms: acc.max_terms })
}

/// Modified Bessel function of the first kind `I_k(x)` for `x ≥ 0`.
pub fn bessel_i(k: u32, x: f64) -> Result<f64> {
    bessel_i_with(k, x, SeriesAccuracy::default())
}

pub fn bessel_i_with(k: u32, x: f64, acc: SeriesAccuracy) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("bessel_i expects a finite nonnegative argument, got {x}"));
    }
    Ok(bessel_i_series(k, Complex64::new(x, 0.0), acc)?.re)
}

/// `I_k(z)` continued to complex `z` by its power series.
pub fn bessel_i_complex(k: u32, z: Complex64) -> Result<Complex64> {
    bessel_i_series(k, z, SeriesAccuracy::default())
}

/// Bessel function `J_m(iλ) = i^m I_m(λ)` at purely imaginary argument `iλ`,
/// for complex `λ`.
pub fn bessel_j_imag(m: u32, lambda: Complex64) -> Result<Complex64> {
    let i_pow = match m % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    Ok(i_pow * bessel_i_complex(m, lambda)?)
}

/// Largest `|z|` accepted by [`hyp1f1`].
pub const HYP1F1_MAX_ARG: f64 = 50.0;

/// Kummer's confluent hypergeometric function `₁F₁(a; b; z)`.
pub fn hyp1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    hyp1f1_with(a, b, z, SeriesAccuracy::default())
}

pub fn hyp1f1_with(a: f64, b: f64, z: f64, acc: SeriesAccuracy) -> Result<f64> {
    if b <= 0.0 && b == b.round() {
        return domain(format!("₁F₁ undefined for nonpositive integer b = {b}"));
    }
    if !z.is_finite() || z.abs() > HYP1F1_MAX_ARG {
        return domain(format!("₁F₁ argument |z| = {} exceeds {HYP1F1_MAX_ARG}", z.abs()));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let terminates = a <= 0.0 && a == a.round();
    if z < 0.0 && !terminates {
        // Kummer's transformation avoids the alternating series
        return Ok(z.exp() * hyp1f1_with(b - a, b, -z, acc)?);
    }
    let mut term = 1.0;
    let mut sum = Neumaier::default();
    sum.add(term);
    for j in 0..acc.max_terms {
        let jf = j as f64;
        if a + jf == 0.0 {
            // terminating (polynomial) case
            return Ok(sum.value());
        }
        let ratio = (a + jf) / (b + jf) * z / (jf + 1.0);
        term *= ratio;
        sum.add(term);
        let scale = sum.value().abs().max(1.0);
        if ratio.abs() < 0.5 && term.abs() <= 0.5 * acc.abs_tol * scale {
            return Ok(sum.value());
        }
    }
    Err(PhaseLabError::NonConvergence { what: "Kummer series", max_terms: acc.max_terms })
}

/// Coefficients of the parabolic-cylinder-type equation
/// `χ″ = (p² φ² − 2 p a) χ`.
///
/// The product branch uses `p = Δn/√⟨φ²⟩`, `a = Δn √⟨φ²⟩`; the sum branch
/// uses `p = 1`, `a = (⟨φ²⟩ + Δn²)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderParams {
    pub p: f64,
    pub a: f64,
}

/// `y₁`, `y₂` and their `φ`-derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderValues {
    pub y1: f64,
    pub y2: f64,
    pub dy1: f64,
    pub dy2: f64,
}

impl CylinderValues {
    pub fn wronskian(&self) -> f64 {
        self.y1 * self.dy2 - self.y2 * self.dy1
    }

    /// Magnitude of the two products entering the Wronskian; rounding error in
    /// [`Self::wronskian`] scales with it.
    pub fn wronskian_scale(&self) -> f64 {
        (self.y1 * self.dy2).abs() + (self.y2 * self.dy1).abs()
    }
}

impl CylinderParams {
    /// Branch arising from minimizing the product of variances.
    pub fn product(delta_n: f64, phi2_mean: f64) -> Result<Self> {
        check_positive(delta_n, phi2_mean)?;
        let root = phi2_mean.sqrt();
        Ok(Self { p: delta_n / root, a: delta_n * root })
    }

    /// Branch arising from minimizing the sum of variances.
    pub fn sum(delta_n: f64, phi2_mean: f64) -> Result<Self> {
        check_positive(delta_n, phi2_mean)?;
        Ok(Self { p: 1.0, a: 0.5 * (phi2_mean + delta_n * delta_n) })
    }

    /// Coefficient `q(φ)` in `χ″ = q(φ) χ`.
    pub fn potential(&self, phi: f64) -> f64 {
        self.p * self.p * phi * phi - 2.0 * self.p * self.a
    }

    /// Wronskian `y₁ y₂′ − y₂ y₁′`, constant and equal to its value at 0.
    pub fn wronskian_constant(&self) -> f64 {
        (2.0 * self.p).sqrt()
    }

    /// Evaluates the even solution `y₁` (with `y₁(0) = 1`) and the odd
    /// solution `y₂` (with `y₂′(0) = √(2p)`).
    pub fn eval(&self, phi: f64) -> Result<CylinderValues> {
        let p = self.p;
        let w = p * phi * phi;
        let gauss = (-0.5 * w).exp();
        let a1 = 0.5 * (0.5 - self.a);
        let a2 = 0.5 * (1.5 - self.a);
        let m1 = hyp1f1(a1, 0.5, w)?;
        let m1d = hyp1f1(a1 + 1.0, 1.5, w)? * a1 / 0.5;
        let m2 = hyp1f1(a2, 1.5, w)?;
        let m2d = hyp1f1(a2 + 1.0, 2.5, w)? * a2 / 1.5;
        let scale = (2.0 * p).sqrt();
        // d/dφ M(·, ·, pφ²) = 2pφ M′
        let y1 = gauss * m1;
        let dy1 = gauss * (-p * phi * m1 + 2.0 * p * phi * m1d);
        let y2 = scale * phi * gauss * m2;
        let dy2 = scale * gauss * (m2 * (1.0 - w) + 2.0 * w * m2d);
        Ok(CylinderValues { y1, y2, dy1, dy2 })
    }
}

fn check_positive(delta_n: f64, phi2_mean: f64) -> Result<()> {
    if !(delta_n > 0.0) || !(phi2_mean > 0.0) {
        return domain(format!(
            "cylinder branch needs Δn > 0 and ⟨φ²⟩ > 0, got Δn = {delta_n}, ⟨φ²⟩ = {phi2_mean}"
        ));
    }
    Ok(())
}

/// Product-branch pair `(y₁, y₂, y₁′, y₂′)` at `φ`.
pub fn cylinder_pair(delta_n: f64, phi2_mean: f64, phi: f64) -> Result<CylinderValues> {
    CylinderParams::product(delta_n, phi2_mean)?.eval(phi)
}
