//! Phase-space observables of a single-mode state: the phase wave function,
//! expectations of functions of the phase, the wrapped phase variance,
//! photon-number moments and the number–phase Wigner function.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, PhaseLabError, Result};
use crate::quadrature::{phase_grid, romberg, simpson_periodic};
use crate::spectrum::Spectrum;
use crate::state::FockVector;

const PI_SQ_OVER_3: f64 = PI * PI / 3.0;

/// A function `f₁(φ)` of the phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseFunction {
    /// `φ` itself, measured from the optimal reference point `γ₀`.
    WrappedPhi,
    ExpPlus,
    ExpMinus,
    CosPhi,
    SinPhi,
}

const EXP_PLUS: [(i64, Complex64); 1] = [(1, Complex64::new(1.0, 0.0))];
const EXP_MINUS: [(i64, Complex64); 1] = [(-1, Complex64::new(1.0, 0.0))];
const COS: [(i64, Complex64); 2] = [(1, Complex64::new(0.5, 0.0)), (-1, Complex64::new(0.5, 0.0))];
const SIN: [(i64, Complex64); 2] = [(1, Complex64::new(0.0, -0.5)), (-1, Complex64::new(0.0, 0.5))];

impl PhaseFunction {
    pub const ALL: [PhaseFunction; 5] = [
        PhaseFunction::WrappedPhi,
        PhaseFunction::ExpPlus,
        PhaseFunction::ExpMinus,
        PhaseFunction::CosPhi,
        PhaseFunction::SinPhi,
    ];

    /// Fourier coefficients `(k, f̂_k)` with `f(φ) = Σ f̂_k e^{ikφ}`;
    /// `None` for the wrapped phase, which is not a trigonometric polynomial.
    pub fn fourier_terms(self) -> Option<&'static [(i64, Complex64)]> {
        match self {
            PhaseFunction::WrappedPhi => None,
            PhaseFunction::ExpPlus => Some(&EXP_PLUS),
            PhaseFunction::ExpMinus => Some(&EXP_MINUS),
            PhaseFunction::CosPhi => Some(&COS),
            PhaseFunction::SinPhi => Some(&SIN),
        }
    }

    /// Value at `φ ∈ [−π, π]`.
    pub fn eval(self, phi: f64) -> Complex64 {
        match self.fourier_terms() {
            None => Complex64::new(phi, 0.0),
            Some(terms) => terms.iter().map(|(k, w)| w * Complex64::from_polar(1.0, *k as f64 * phi)).sum(),
        }
    }

    /// Real-valued (self-adjoint multiplication operator).
    pub fn is_real(self) -> bool {
        matches!(self, PhaseFunction::WrappedPhi | PhaseFunction::CosPhi | PhaseFunction::SinPhi)
    }

    /// `f · g` on Fourier coefficients.
    pub fn apply(self, g: &Spectrum) -> Option<Spectrum> {
        let terms = self.fourier_terms()?;
        let mut out = Spectrum::new(g.lo(), Vec::new());
        for (k, w) in terms {
            out = out.axpy(*w, &g.shifted(-k));
        }
        Some(out)
    }

    /// `f* · g` on Fourier coefficients.
    pub fn apply_conj(self, g: &Spectrum) -> Option<Spectrum> {
        let terms = self.fourier_terms()?;
        let mut out = Spectrum::new(g.lo(), Vec::new());
        for (k, w) in terms {
            out = out.axpy(w.conj(), &g.shifted(*k));
        }
        Some(out)
    }

    pub fn name(self) -> &'static str {
        match self {
            PhaseFunction::WrappedPhi => "phi",
            PhaseFunction::ExpPlus => "exp+",
            PhaseFunction::ExpMinus => "exp-",
            PhaseFunction::CosPhi => "cos",
            PhaseFunction::SinPhi => "sin",
        }
    }
}

impl fmt::Display for PhaseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PhaseFunction {
    type Err = PhaseLabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "phi" | "wrapped-phi" => Ok(PhaseFunction::WrappedPhi),
            "exp+" | "exp-plus" => Ok(PhaseFunction::ExpPlus),
            "exp-" | "exp-minus" => Ok(PhaseFunction::ExpMinus),
            "cos" | "cos-phi" => Ok(PhaseFunction::CosPhi),
            "sin" | "sin-phi" => Ok(PhaseFunction::SinPhi),
            other => domain(format!("unknown phase function `{other}` (expected phi, exp+, exp-, cos, sin)")),
        }
    }
}

/// `ψ(φ) = (2π)^{-1/2} Σ cₙ e^{−inφ}` for a borrowed state.
#[derive(Debug, Clone, Copy)]
pub struct PhaseWaveFunction<'a> {
    source: &'a FockVector,
}

impl<'a> PhaseWaveFunction<'a> {
    pub fn new(source: &'a FockVector) -> Self {
        Self { source }
    }

    pub fn source(&self) -> &'a FockVector {
        self.source
    }

    pub fn eval(&self, phi: f64) -> Complex64 {
        self.source.psi(phi)
    }

    pub fn density(&self, phi: f64) -> f64 {
        self.eval(phi).norm_sqr()
    }
}

pub fn eval_psi(state: &FockVector, phi: f64) -> Complex64 {
    state.psi(phi)
}

/// `⟨f(φ)⟩` through Fourier matrix elements. For `WrappedPhi` this is the
/// plain first moment on `[−π, π)`, as in [`phi_moment`].
pub fn expect_phase_function(state: &FockVector, f: PhaseFunction) -> Complex64 {
    match f.fourier_terms() {
        None => Complex64::new(phi_moment_at(&autocorrelation(state.coeffs()), 1, 0.0), 0.0),
        Some(_) => {
            let z = exp_minus_expectation(state.coeffs());
            match f {
                PhaseFunction::ExpMinus => z,
                PhaseFunction::ExpPlus => z.conj(),
                PhaseFunction::CosPhi => Complex64::new(z.re, 0.0),
                PhaseFunction::SinPhi => Complex64::new(-z.im, 0.0),
                PhaseFunction::WrappedPhi => unreachable!(),
            }
        }
    }
}

/// `⟨e^{−iφ}⟩ = Σ c*_{n+1} cₙ`.
pub(crate) fn exp_minus_expectation(c: &[Complex64]) -> Complex64 {
    c.windows(2).map(|w| w[1].conj() * w[0]).sum()
}

/// Same expectation by quadrature on `points` grid nodes: periodic Simpson
/// for the trigonometric kinds, Romberg (`points` a power of two) for `φ`.
pub fn expect_phase_function_quadrature(state: &FockVector, f: PhaseFunction, points: usize) -> Complex64 {
    match f {
        PhaseFunction::WrappedPhi => {
            Complex64::new(romberg(-PI, PI, points, |phi| phi * state.psi(phi).norm_sqr()), 0.0)
        }
        _ => simpson_periodic(points, |phi| f.eval(phi) * state.psi(phi).norm_sqr()),
    }
}

/// `(Δf)²`. For the wrapped phase this is the minimized variance of
/// [`wrapped_phase_variance`].
pub fn phase_function_variance(state: &FockVector, f: PhaseFunction) -> f64 {
    match delta_spectrum(state, f) {
        Some(d) => d.norm_sqr(),
        None => wrapped_phase_variance(state).variance,
    }
}

/// Spectrum of `(f − ⟨f⟩)ψ`, or `None` for the wrapped phase.
pub fn delta_spectrum(state: &FockVector, f: PhaseFunction) -> Option<Spectrum> {
    let psi = Spectrum::from_state(state);
    let fpsi = f.apply(&psi)?;
    let mean = expect_phase_function(state, f);
    Some(fpsi.axpy(-mean, &psi))
}

/// Matrix element `⟨j|φ^order|l⟩` of multiplication by `φ^order` on
/// `[−π, π)`, as a function of `k = j − l`. Supported orders: 1, 2, 4.
pub fn phi_matrix_element(order: u32, k: i64) -> Result<Complex64> {
    let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let kf = k as f64;
    let v = match (order, k) {
        (1, 0) => Complex64::new(0.0, 0.0),
        (1, _) => Complex64::new(0.0, -sign / kf),
        (2, 0) => Complex64::new(PI_SQ_OVER_3, 0.0),
        (2, _) => Complex64::new(2.0 * sign / (kf * kf), 0.0),
        (4, 0) => Complex64::new(PI.powi(4) / 5.0, 0.0),
        (4, _) => {
            let k2 = kf * kf;
            Complex64::new(sign * (4.0 * PI * PI / k2 - 24.0 / (k2 * k2)), 0.0)
        }
        _ => return domain(format!("φ-power {order} not supported")),
    };
    Ok(v)
}

/// Rows `j ∈ rows` of `φ^order c`, i.e. `Σ_l ⟨j|φ^order|l⟩ c_l`; rows may lie
/// outside the truncated space.
pub fn apply_phi_power(c: &[Complex64], order: u32, rows: std::ops::RangeInclusive<i64>) -> Result<Vec<Complex64>> {
    phi_matrix_element(order, 0)?;
    let max_k = (rows.end().abs().max(rows.start().abs()) + c.len() as i64 + 1) as usize;
    let table: Vec<Complex64> = (-(max_k as i64)..=max_k as i64)
        .map(|k| phi_matrix_element(order, k).expect("order checked"))
        .collect();
    let elem = |k: i64| table[(k + max_k as i64) as usize];
    Ok(rows
        .map(|j| c.iter().enumerate().map(|(l, cl)| elem(j - l as i64) * cl).sum())
        .collect())
}

/// `r_k = Σ_l c*_{l+k} c_l` for `k = 0..=N`.
pub fn autocorrelation(c: &[Complex64]) -> Vec<Complex64> {
    (0..c.len())
        .map(|k| c[k..].iter().zip(c).map(|(a, b)| a.conj() * b).sum())
        .collect()
}

/// `⟨φ^order⟩` of the state shifted by `γ` (coefficients `cₙe^{−inγ}`),
/// from its autocorrelation.
pub(crate) fn phi_moment_at(r: &[Complex64], order: u32, gamma: f64) -> f64 {
    let mut sum = match order {
        1 => 0.0,
        _ => PI_SQ_OVER_3 * r[0].re,
    };
    for (k, rk) in r.iter().enumerate().skip(1) {
        let e = rk * Complex64::from_polar(1.0, k as f64 * gamma);
        let m = phi_matrix_element(order, k as i64).expect("order 1 or 2");
        sum += 2.0 * (m * e).re;
    }
    sum
}

/// `⟨φ^k⟩ = ∫ φ^k |ψ(φ)|² dφ` on `[−π, π)`, `k ∈ {1, 2}`.
pub fn phi_moment(state: &FockVector, k: u32) -> Result<f64> {
    if k != 1 && k != 2 {
        return domain(format!("phi moment of order {k} not supported (1 or 2)"));
    }
    Ok(phi_moment_at(&autocorrelation(state.coeffs()), k, 0.0))
}

/// Quadrature cross-check of [`phi_moment`] (Romberg on `points`, a power of two).
pub fn phi_moment_quadrature(state: &FockVector, k: u32, points: usize) -> Result<f64> {
    if k != 1 && k != 2 {
        return domain(format!("phi moment of order {k} not supported (1 or 2)"));
    }
    Ok(romberg(-PI, PI, points, |phi| phi.powi(k as i32) * state.psi(phi).norm_sqr()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WrappedVarianceResult {
    /// Optimal reference point in `[−π, π)`.
    pub gamma0: f64,
    pub variance: f64,
    /// `⟨φ⟩` of the shifted state; vanishes at an interior minimum.
    pub stationarity_residual: f64,
}

/// Grid size of the coarse γ scan.
pub const GAMMA_GRID: usize = 720;

/// `V(γ) = ∫ φ²|ψ(φ+γ)|² dφ` and its derivatives as trigonometric
/// polynomials `Re Σ_k A_k e^{ikγ}`, evaluated by Horner's rule.
pub(crate) struct WrappedProfile {
    r0: f64,
    value: Vec<Complex64>,
    mean: Vec<Complex64>,
    curvature: Vec<Complex64>,
}

fn horner_re(coeffs: &[Complex64], g: f64) -> f64 {
    // Σ_{k≥1} A_k w^k with coeffs[k−1] = A_k
    let w = Complex64::from_polar(1.0, g);
    let mut acc = Complex64::new(0.0, 0.0);
    for a in coeffs.iter().rev() {
        acc = acc * w + a;
    }
    (acc * w).re
}

impl WrappedProfile {
    pub(crate) fn new(c: &[Complex64]) -> Self {
        let r = autocorrelation(c);
        let mut value = Vec::with_capacity(r.len());
        let mut mean = Vec::with_capacity(r.len());
        let mut curvature = Vec::with_capacity(r.len());
        for (k, rk) in r.iter().enumerate().skip(1) {
            let k = k as i64;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            value.push(2.0 * phi_matrix_element(2, k).expect("order 2") * rk);
            mean.push(2.0 * phi_matrix_element(1, k).expect("order 1") * rk);
            curvature.push(-4.0 * sign * rk);
        }
        Self { r0: r[0].re, value, mean, curvature }
    }

    pub(crate) fn value(&self, g: f64) -> f64 {
        PI_SQ_OVER_3 * self.r0 + horner_re(&self.value, g)
    }

    pub(crate) fn mean(&self, g: f64) -> f64 {
        horner_re(&self.mean, g)
    }

    fn d1(&self, g: f64) -> f64 {
        -2.0 * self.mean(g)
    }

    fn d2(&self, g: f64) -> f64 {
        horner_re(&self.curvature, g)
    }

    /// `V` on the scan grid `γ_j = −π + 2πj/M`, via one inverse FFT of the
    /// coefficients `(−1)^k A_k` (folded mod `M`).
    fn grid_values(&self) -> Vec<f64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); GAMMA_GRID];
        for (i, a) in self.value.iter().enumerate() {
            let k = i + 1;
            buf[k % GAMMA_GRID] += if k % 2 == 0 { *a } else { -a };
        }
        GRID_FFT.with(|fft| fft.process(&mut buf));
        let base = PI_SQ_OVER_3 * self.r0;
        buf.iter().map(|x| base + x.re).collect()
    }
}

thread_local! {
    static GRID_FFT: std::sync::Arc<dyn rustfft::Fft<f64>> =
        rustfft::FftPlanner::new().plan_fft_inverse(GAMMA_GRID);
}

/// `∫ φ²|ψ(φ+γ)|² dφ` for a fixed reference point.
pub fn wrapped_variance_at(state: &FockVector, gamma: f64) -> f64 {
    WrappedProfile::new(state.coeffs()).value(gamma)
}

fn wrap_angle(g: f64) -> f64 {
    let w = (g + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        -PI
    } else {
        w
    }
}

/// Minimizes `∫ φ²|ψ(φ+γ)|² dφ` over `γ`: a 720-point scan (one FFT), golden-section
/// refinement around the best node, then a safeguarded Newton polish on
/// `dV/dγ = −2⟨φ⟩`. Flat profiles (number states) return `γ₀ = −π`.
pub fn wrapped_phase_variance(state: &FockVector) -> WrappedVarianceResult {
    minimize_profile(&WrappedProfile::new(state.coeffs()))
}

pub(crate) fn minimize_profile(prof: &WrappedProfile) -> WrappedVarianceResult {
    let h = 2.0 * PI / GAMMA_GRID as f64;
    let values = prof.grid_values();
    let vmin = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let vmax = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let finish = |g: f64| {
        let g = wrap_angle(g);
        WrappedVarianceResult {
            gamma0: g,
            variance: prof.value(g),
            stationarity_residual: prof.mean(g),
        }
    };
    if vmax - vmin <= 1e-14 * vmax.abs().max(1.0) {
        return finish(-PI);
    }
    let tie = 1e-13 * vmin.abs().max(1.0);
    let best = values.iter().position(|&v| v <= vmin + tie).expect("nonempty grid");
    let centre = -PI + best as f64 * h;

    // golden section on [centre − h, centre + h]
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (centre - h, centre + h);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (prof.value(x1), prof.value(x2));
    while b - a > 1e-7 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = prof.value(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = prof.value(x2);
        }
    }
    let mut g = 0.5 * (a + b);

    // widen the bracket until dV/dγ changes sign, then polish
    let (mut lo, mut hi) = (a, b);
    let mut widen = 0;
    while !(prof.d1(lo) <= 0.0 && prof.d1(hi) >= 0.0) && widen < 20 {
        lo -= (b - a) * 2f64.powi(widen);
        hi += (b - a) * 2f64.powi(widen);
        widen += 1;
    }
    if prof.d1(lo) <= 0.0 && prof.d1(hi) >= 0.0 {
        for _ in 0..100 {
            let d = prof.d1(g);
            if d == 0.0 {
                break;
            }
            if d < 0.0 {
                lo = g;
            } else {
                hi = g;
            }
            let dd = prof.d2(g);
            let newton = if dd > 0.0 { g - d / dd } else { f64::NAN };
            let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if (next - g).abs() <= 1e-15 * g.abs().max(1.0) || hi - lo <= 1e-15 {
                g = next;
                break;
            }
            g = next;
        }
    }
    finish(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumberMoments {
    pub mean: f64,
    pub variance: f64,
}

/// `⟨n⟩` and the centred `(Δn)²`.
pub fn number_moments(state: &FockVector) -> NumberMoments {
    let p: Vec<f64> = state.coeffs().iter().map(|c| c.norm_sqr()).collect();
    let mean: f64 = p.iter().enumerate().map(|(n, w)| n as f64 * w).sum();
    let variance = p.iter().enumerate().map(|(n, w)| (n as f64 - mean).powi(2) * w).sum();
    NumberMoments { mean, variance }
}

/// `Re{ψ(φ) c*ₙ e^{inφ}} / √(2π)`.
pub fn wigner_number_phase(state: &FockVector, phi: f64, n: usize) -> Result<f64> {
    let c = state
        .coeffs()
        .get(n)
        .ok_or(PhaseLabError::Index { index: n, n_trunc: state.n_trunc() })?;
    let v = state.psi(phi) * c.conj() * Complex64::from_polar(1.0, n as f64 * phi);
    Ok(v.re / (2.0 * PI).sqrt())
}

/// `(φ, |ψ(φ)|²)` on the uniform `points`-node grid.
pub fn phase_density_rows(state: &FockVector, points: usize) -> Vec<(f64, f64)> {
    phase_grid(points).map(|phi| (phi, state.psi(phi).norm_sqr())).collect()
}

/// `(φ, n, ρ_W(φ, n))` for every grid node and photon number.
pub fn wigner_rows(state: &FockVector, points: usize) -> Vec<(f64, usize, f64)> {
    let mut rows = Vec::with_capacity(points * state.dim());
    for phi in phase_grid(points) {
        for n in 0..state.dim() {
            rows.push((phi, n, wigner_number_phase(state, phi, n).expect("n in range")));
        }
    }
    rows
}
