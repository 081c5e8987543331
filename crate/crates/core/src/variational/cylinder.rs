//! Analytic stationary branch of the product (and sum) problem with `Δn > 0`.
//!
//! Writing `ψ(φ) = e^{-i⟨n⟩φ} χ(φ)` turns the stationarity equation into
//! `χ″ = (p²φ² − 2pa) χ`, whose solutions are `χ = a₁y₁ + a₂y₂` with the even
//! and odd Kummer-function pair of [`CylinderParams`]. A state must in
//! addition be `2π`-periodic and carry no `e^{+ikφ}` modes. With real
//! `a₁, a₂` periodicity decouples into
//! `a₁ sin(⟨n⟩π) y₁(π) = 0`, `a₁ cos(⟨n⟩π) y₁′(π) = 0`,
//! `a₂ cos(⟨n⟩π) y₂(π) = 0`, `a₂ sin(⟨n⟩π) y₂′(π) = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quadrature::{romberg_samples, ROMBERG_SPAN};
use crate::specfun::{CylinderParams, CylinderValues, HYP1F1_MAX_ARG};

/// Number of forbidden modes `e^{+ikφ}`, `k = 1..=K`, that are checked.
pub const CYLINDER_FOURIER_MODES: usize = 32;

/// A branch passes the Fourier test when the normalized forbidden-mode
/// amplitude stays below this.
pub const FOURIER_DEFECT_THRESHOLD: f64 = 1e-6;

/// Relative violation of the periodicity equations tolerated for a direction
/// to count as periodic.
const PERIODICITY_TOL: f64 = 1e-8;

/// `|sin|` or `|cos|` below this selects case (ii) or (iii).
const CASE_TOL: f64 = 1e-12;

/// Intervals of the sampling grid on `[−π, π]`.
const SAMPLE_INTERVALS: usize = 2048;

const WRONSKIAN_POINTS: usize = 64;
const WRONSKIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchKind {
    /// `χ″ = ((Δn)²φ²/⟨φ²⟩ − 2(Δn)²) χ`
    Product,
    /// `χ″ = (φ² − ⟨φ²⟩ − (Δn)²) χ`
    Sum,
}

impl BranchKind {
    pub fn params(self, delta_n: f64, phi2_mean: f64) -> Result<CylinderParams> {
        match self {
            BranchKind::Product => CylinderParams::product(delta_n, phi2_mean),
            BranchKind::Sum => CylinderParams::sum(delta_n, phi2_mean),
        }
    }
}

/// Which of the three periodicity regimes applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CylinderCase {
    /// `sin(⟨n⟩π) ≠ 0 ≠ cos(⟨n⟩π)`: every periodic solution vanishes.
    #[serde(rename = "i")]
    Generic,
    /// `⟨n⟩ = N`: needs `a₂y₂(π) = 0 = a₁y₁′(π)` and band limit `0..=2N`.
    #[serde(rename = "ii")]
    Integer,
    /// `⟨n⟩ = N + ½`: needs `a₁y₁(π) = 0 = a₂y₂′(π)` and band limit `0..=2N+1`.
    #[serde(rename = "iii")]
    HalfInteger,
}

impl CylinderCase {
    pub fn tag(self) -> &'static str {
        match self {
            CylinderCase::Generic => "i",
            CylinderCase::Integer => "ii",
            CylinderCase::HalfInteger => "iii",
        }
    }

    fn classify(mean_n: f64) -> Self {
        let (s, c) = (mean_n * PI).sin_cos();
        if s.abs() < CASE_TOL {
            CylinderCase::Integer
        } else if c.abs() < CASE_TOL {
            CylinderCase::HalfInteger
        } else {
            CylinderCase::Generic
        }
    }

    /// Highest allowed photon number for integer or half-integer `⟨n⟩`.
    fn band_top(self, mean_n: f64) -> Option<i64> {
        match self {
            CylinderCase::Generic => None,
            CylinderCase::Integer => Some(2 * mean_n.round() as i64),
            CylinderCase::HalfInteger => Some(2 * (mean_n - 0.5).round() as i64 + 1),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CylinderBranchResult {
    pub branch: BranchKind,
    pub mean_n: f64,
    pub delta_n: f64,
    pub phi2_mean: f64,
    pub params: CylinderParams,
    pub case_tag: CylinderCase,
    /// Coefficients normalizing `∫|χ|² = 1`; both zero for the trivial solution.
    pub a1: Complex64,
    pub a2: Complex64,
    /// Relative violation of the periodicity equations by the reported
    /// direction (or by the least-violating one when the solution is trivial).
    pub periodicity_defect: f64,
    /// `(Σ_{k=1..K} |c_{−k}|²)^{1/2}` for the normalized candidate.
    pub fourier_defect: f64,
    /// `|c_{−k}|` for `k = 1..=K`.
    pub forbidden_spectrum: Vec<f64>,
    /// Content outside `0..=2N` (or `0..=2N+1`) in cases (ii) and (iii).
    pub band_limit_defect: Option<f64>,
    /// `max |W(φ) − W(0)| / max(1, |y₁y₂′| + |y₂y₁′|)` over `[−π, π]`.
    pub wronskian_error: f64,
    pub trivial: bool,
}

impl CylinderBranchResult {
    /// Nontrivial, periodic and free of forbidden modes.
    pub fn admissible(&self) -> bool {
        !self.trivial && self.periodicity_defect < PERIODICITY_TOL && self.fourier_defect < FOURIER_DEFECT_THRESHOLD
    }

    pub fn wronskian_ok(&self) -> bool {
        self.wronskian_error <= WRONSKIAN_TOL
    }
}

struct Samples {
    y1: Vec<f64>,
    y2: Vec<f64>,
}

fn sample(params: &CylinderParams) -> Result<Samples> {
    let h = 2.0 * PI / SAMPLE_INTERVALS as f64;
    let mut y1 = Vec::with_capacity(SAMPLE_INTERVALS + 1);
    let mut y2 = Vec::with_capacity(SAMPLE_INTERVALS + 1);
    for j in 0..=SAMPLE_INTERVALS {
        let v = params.eval(-PI + j as f64 * h)?;
        y1.push(v.y1);
        y2.push(v.y2);
    }
    Ok(Samples { y1, y2 })
}

fn integrate(values: &[f64]) -> f64 {
    romberg_samples(-PI, PI, SAMPLE_INTERVALS / ROMBERG_SPAN, values)
}

/// `(2π)^{-1/2} ∫ e^{-i⟨n⟩φ} y(φ) e^{ijφ} dφ`, the coefficient of `e^{-ijφ}`.
fn coefficient(y: &[f64], mean_n: f64, j: f64) -> Complex64 {
    let h = 2.0 * PI / SAMPLE_INTERVALS as f64;
    let freq = j - mean_n;
    let (re, im): (Vec<f64>, Vec<f64>) = y
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let (s, c) = (freq * (-PI + i as f64 * h)).sin_cos();
            (v * c, v * s)
        })
        .unzip();
    Complex64::new(integrate(&re), integrate(&im)) / (2.0 * PI).sqrt()
}

/// Normalized forbidden-mode amplitude of an arbitrary function on
/// `[−π, π]`: `(Σ_{k=1..K} |c_{−k}|²)^{1/2} / ‖ψ‖`.
pub fn fourier_defect_of<F: Fn(f64) -> Complex64>(psi: F) -> f64 {
    let h = 2.0 * PI / SAMPLE_INTERVALS as f64;
    let vals: Vec<Complex64> = (0..=SAMPLE_INTERVALS).map(|j| psi(-PI + j as f64 * h)).collect();
    let norm_sqr = integrate(&vals.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>());
    if norm_sqr == 0.0 {
        return 0.0;
    }
    let mut energy = 0.0;
    for k in 1..=CYLINDER_FOURIER_MODES {
        let (re, im): (Vec<f64>, Vec<f64>) = vals
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let w = v * Complex64::from_polar(1.0, -(k as f64) * (-PI + i as f64 * h));
                (w.re, w.im)
            })
            .unzip();
        energy += (integrate(&re).powi(2) + integrate(&im).powi(2)) / (2.0 * PI);
    }
    (energy / norm_sqr).sqrt()
}

fn wronskian_error(params: &CylinderParams) -> Result<f64> {
    let w0 = params.wronskian_constant();
    let mut worst: f64 = 0.0;
    for j in 0..=WRONSKIAN_POINTS {
        let phi = -PI + 2.0 * PI * j as f64 / WRONSKIAN_POINTS as f64;
        let v = params.eval(phi)?;
        worst = worst.max((v.wronskian() - w0).abs() / v.wronskian_scale().max(1.0));
    }
    Ok(worst)
}

/// Periodicity violation of the pure `y₁` and pure `y₂` directions.
fn direction_defects(end: &CylinderValues, mean_n: f64) -> (f64, f64) {
    let (s, c) = (mean_n * PI).sin_cos();
    let d1 = (s * end.y1).hypot(c * end.dy1) / end.y1.hypot(end.dy1);
    let d2 = (c * end.y2).hypot(s * end.dy2) / end.y2.hypot(end.dy2);
    (d1, d2)
}

/// Smallest generalized eigenpair of the 2×2 symmetric pencil `(q, b)`.
fn min_pencil(q: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> (f64, [f64; 2]) {
    // det(q − λb) = 0
    let a2 = b[0][0] * b[1][1] - b[0][1] * b[0][1];
    let a1 = -(q[0][0] * b[1][1] + q[1][1] * b[0][0] - 2.0 * q[0][1] * b[0][1]);
    let a0 = q[0][0] * q[1][1] - q[0][1] * q[0][1];
    let disc = (a1 * a1 - 4.0 * a2 * a0).max(0.0).sqrt();
    let lam = (-a1 - disc) / (2.0 * a2);
    let r0 = [q[0][0] - lam * b[0][0], q[0][1] - lam * b[0][1]];
    let r1 = [q[0][1] - lam * b[0][1], q[1][1] - lam * b[1][1]];
    let row = if r0[0].hypot(r0[1]) >= r1[0].hypot(r1[1]) { r0 } else { r1 };
    let v = if row[0] == 0.0 && row[1] == 0.0 { [1.0, 0.0] } else { [-row[1], row[0]] };
    (lam.max(0.0), v)
}

/// Checks the `Δn > 0` branch at one parameter point for a nontrivial
/// periodic solution free of `e^{+ikφ}` modes.
pub fn cylinder_branch_analysis(
    mean_n: f64,
    delta_n: f64,
    phi2_mean: f64,
    branch: BranchKind,
) -> Result<CylinderBranchResult> {
    if !mean_n.is_finite() {
        return domain(format!("⟨n⟩ must be finite, got {mean_n}"));
    }
    let params = branch.params(delta_n, phi2_mean)?;
    if params.p * PI * PI > HYP1F1_MAX_ARG {
        return domain(format!(
            "p π² = {} exceeds the supported Kummer argument {HYP1F1_MAX_ARG}",
            params.p * PI * PI
        ));
    }
    let case_tag = CylinderCase::classify(mean_n);
    let end = params.eval(PI)?;
    let (d1, d2) = direction_defects(&end, mean_n);
    let samples = sample(&params)?;

    let b11 = integrate(&samples.y1.iter().map(|v| v * v).collect::<Vec<_>>());
    let b22 = integrate(&samples.y2.iter().map(|v| v * v).collect::<Vec<_>>());
    // y₁ even, y₂ odd
    let b12 = 0.0;
    let proj1: Vec<Complex64> =
        (1..=CYLINDER_FOURIER_MODES).map(|k| coefficient(&samples.y1, mean_n, -(k as f64))).collect();
    let proj2: Vec<Complex64> =
        (1..=CYLINDER_FOURIER_MODES).map(|k| coefficient(&samples.y2, mean_n, -(k as f64))).collect();

    let ok1 = d1 < PERIODICITY_TOL;
    let ok2 = d2 < PERIODICITY_TOL;
    let trivial = !ok1 && !ok2;
    let dir: [f64; 2] = match (ok1, ok2) {
        (true, true) => {
            let q11: f64 = proj1.iter().map(|x| x.norm_sqr()).sum();
            let q22: f64 = proj2.iter().map(|x| x.norm_sqr()).sum();
            let q12: f64 = proj1.iter().zip(&proj2).map(|(x, y)| (x.conj() * y).re).sum();
            min_pencil([[q11, q12], [q12, q22]], [[b11, b12], [b12, b22]]).1
        }
        (true, false) => [1.0, 0.0],
        (false, true) => [0.0, 1.0],
        // report the direction closest to periodic
        (false, false) if d1 <= d2 => [1.0, 0.0],
        (false, false) => [0.0, 1.0],
    };
    let norm = (dir[0] * dir[0] * b11 + dir[1] * dir[1] * b22 + 2.0 * dir[0] * dir[1] * b12).sqrt();
    let (c1, c2) = (dir[0] / norm, dir[1] / norm);
    let periodicity_defect = (c1 * c1 * b11 * d1 * d1 + c2 * c2 * b22 * d2 * d2).sqrt();
    let forbidden_spectrum: Vec<f64> = proj1.iter().zip(&proj2).map(|(x, y)| (x * c1 + y * c2).norm()).collect();
    let fourier_defect = forbidden_spectrum.iter().map(|x| x * x).sum::<f64>().sqrt();

    let band_limit_defect = case_tag.band_top(mean_n).map(|top| {
        let chi: Vec<f64> = samples.y1.iter().zip(&samples.y2).map(|(u, v)| c1 * u + c2 * v).collect();
        let above: f64 = (top + 1..=top + CYLINDER_FOURIER_MODES as i64)
            .map(|j| coefficient(&chi, mean_n, j as f64).norm_sqr())
            .sum();
        (above + fourier_defect * fourier_defect).sqrt()
    });

    let (a1, a2) = if trivial { (0.0, 0.0) } else { (c1, c2) };
    Ok(CylinderBranchResult {
        branch,
        mean_n,
        delta_n,
        phi2_mean,
        params,
        case_tag,
        a1: Complex64::new(a1, 0.0),
        a2: Complex64::new(a2, 0.0),
        periodicity_defect,
        fourier_defect,
        forbidden_spectrum,
        band_limit_defect,
        wronskian_error: wronskian_error(&params)?,
        trivial,
    })
}

/// [`cylinder_branch_analysis`] over a Cartesian grid, in parallel.
pub fn cylinder_branch_grid(
    means: &[f64],
    delta_ns: &[f64],
    phi2s: &[f64],
    branch: BranchKind,
) -> Result<Vec<CylinderBranchResult>> {
    let points: Vec<(f64, f64, f64)> = means
        .iter()
        .flat_map(|&m| delta_ns.iter().flat_map(move |&d| phi2s.iter().map(move |&p| (m, d, p))))
        .collect();
    points.into_par_iter().map(|(m, d, p)| cylinder_branch_analysis(m, d, p, branch)).collect()
}

/// Values of `⟨φ²⟩` in `[lo, hi]` at which one of the two periodicity
/// conditions of case (ii) or (iii) holds exactly, so that a nontrivial
/// periodic solution exists. Each root is analysed with
/// [`cylinder_branch_analysis`]. Case (i) admits no such roots.
pub fn cylinder_branch_roots(
    mean_n: f64,
    delta_n: f64,
    phi2_range: (f64, f64),
    scan: usize,
    branch: BranchKind,
) -> Result<Vec<CylinderBranchResult>> {
    let (lo, hi) = phi2_range;
    if !(lo > 0.0 && hi > lo) || scan < 2 {
        return domain(format!("bad ⟨φ²⟩ scan range [{lo}, {hi}] with {scan} points"));
    }
    let case_tag = CylinderCase::classify(mean_n);
    let conditions: [fn(&CylinderValues) -> f64; 2] = match case_tag {
        CylinderCase::Generic => return Ok(Vec::new()),
        CylinderCase::Integer => [|v| v.y2, |v| v.dy1],
        CylinderCase::HalfInteger => [|v| v.y1, |v| v.dy2],
    };
    let end = |phi2: f64| branch.params(delta_n, phi2)?.eval(PI);
    let grid: Vec<f64> = (0..scan).map(|j| lo + (hi - lo) * j as f64 / (scan - 1) as f64).collect();
    let values: Vec<CylinderValues> = grid.iter().map(|&x| end(x)).collect::<Result<_>>()?;
    let mut roots = Vec::new();
    for cond in conditions {
        for j in 1..scan {
            let (fa, fb) = (cond(&values[j - 1]), cond(&values[j]));
            if fa == 0.0 || fa.signum() == fb.signum() {
                continue;
            }
            let (mut a, mut b, mut ga) = (grid[j - 1], grid[j], fa);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let gm = cond(&end(m)?);
                if gm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if gm.signum() == ga.signum() {
                    a = m;
                    ga = gm;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.into_iter().map(|x| cylinder_branch_analysis(mean_n, delta_n, x, branch)).collect()
}

/// `∫ φ^k |χ(φ)|²` for the normalized candidate, used in checks.
#[cfg(test)]
fn chi_moment(r: &CylinderBranchResult, k: i32) -> f64 {
    crate::quadrature::romberg(-PI, PI, SAMPLE_INTERVALS, |phi| {
        let v = r.params.eval(phi).unwrap();
        phi.powi(k) * (r.a1.re * v.y1 + r.a2.re * v.y2).powi(2)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_defect_detects_forbidden_modes() {
        let allowed = |phi: f64| Complex64::from_polar(1.0, -3.0 * phi) + Complex64::from_polar(0.5, 0.0);
        assert!(fourier_defect_of(allowed) < 1e-12);
        let mixed = |phi: f64| Complex64::from_polar(1.0, 2.0 * phi) + Complex64::from_polar(1.0, -phi);
        assert!((fourier_defect_of(mixed) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn generic_mean_gives_trivial_solution() {
        let r = cylinder_branch_analysis(0.3, 1.0, 1.0, BranchKind::Product).unwrap();
        assert_eq!(r.case_tag, CylinderCase::Generic);
        assert!(r.trivial);
        assert_eq!(r.a1, Complex64::new(0.0, 0.0));
        assert!(r.periodicity_defect > PERIODICITY_TOL);
        assert!(r.wronskian_ok());
    }

    #[test]
    fn cases_follow_the_mean() {
        assert_eq!(CylinderCase::classify(2.0), CylinderCase::Integer);
        assert_eq!(CylinderCase::classify(1.5), CylinderCase::HalfInteger);
        assert_eq!(CylinderCase::classify(2.2), CylinderCase::Generic);
        assert_eq!(CylinderCase::Integer.band_top(2.0), Some(4));
        assert_eq!(CylinderCase::HalfInteger.band_top(1.5), Some(3));
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(cylinder_branch_analysis(1.0, 0.0, 1.0, BranchKind::Product).is_err());
        assert!(cylinder_branch_analysis(1.0, 1.0, -1.0, BranchKind::Sum).is_err());
        assert!(cylinder_branch_analysis(f64::NAN, 1.0, 1.0, BranchKind::Sum).is_err());
    }

    #[test]
    fn roots_give_periodic_but_forbidden_solutions() {
        for (mean, branch) in [(1.0, BranchKind::Product), (1.5, BranchKind::Product), (1.0, BranchKind::Sum)] {
            let roots = cylinder_branch_roots(mean, 0.8, (0.2, 3.2), 64, branch).unwrap();
            assert!(!roots.is_empty(), "{mean} {branch:?}");
            for r in roots {
                assert!(!r.trivial, "{r:?}");
                assert!(r.periodicity_defect < PERIODICITY_TOL);
                assert!(r.fourier_defect > FOURIER_DEFECT_THRESHOLD, "{}", r.fourier_defect);
                assert!(r.band_limit_defect.unwrap() > FOURIER_DEFECT_THRESHOLD);
                assert!((chi_moment(&r, 0) - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn generalized_eigenpair() {
        let (lam, v) = min_pencil([[2.0, 0.0], [0.0, 5.0]], [[1.0, 0.0], [0.0, 1.0]]);
        assert!((lam - 2.0).abs() < 1e-14);
        assert!(v[1].abs() < 1e-14);
        let (lam, _) = min_pencil([[2.0, 1.0], [1.0, 2.0]], [[2.0, 0.0], [0.0, 2.0]]);
        assert!((lam - 0.5).abs() < 1e-14);
    }
}
