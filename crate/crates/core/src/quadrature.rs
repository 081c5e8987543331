//! Uniform-grid quadrature on `[−π, π)`.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Default number of quadrature points.
pub const DEFAULT_POINTS: usize = 2048;

/// Uniform grid `φ_j = −π + 2πj/points`, `j = 0..points`.
pub fn phase_grid(points: usize) -> impl Iterator<Item = f64> + Clone {
    let h = 2.0 * PI / points as f64;
    (0..points).map(move |j| -PI + j as f64 * h)
}

/// Composite Simpson rule for a `2π`-periodic integrand sampled on
/// [`phase_grid`]. `points` must be even. Exact for trigonometric
/// polynomials of degree below `points / 2`.
pub fn simpson_periodic<F>(points: usize, mut f: F) -> Complex64
where
    F: FnMut(f64) -> Complex64,
{
    assert!(points >= 4 && points % 2 == 0, "Simpson needs an even number of points");
    let h = 2.0 * PI / points as f64;
    let sum: Complex64 = phase_grid(points)
        .enumerate()
        .map(|(j, phi)| f(phi) * if j % 2 == 0 { 2.0 } else { 4.0 })
        .sum();
    sum * (h / 3.0)
}

/// Composite Simpson rule on `[a, b]` with `intervals` (even) subintervals.
pub fn simpson<F>(a: f64, b: f64, intervals: usize, mut f: F) -> f64
where
    F: FnMut(f64) -> f64,
{
    assert!(intervals >= 2 && intervals % 2 == 0, "Simpson needs an even number of intervals");
    let h = (b - a) / intervals as f64;
    let mut sum = f(a) + f(b);
    for j in 1..intervals {
        sum += f(a + j as f64 * h) * if j % 2 == 0 { 2.0 } else { 4.0 };
    }
    sum * h / 3.0
}

/// Romberg integration on `[a, b]` using trapezoid sums from `coarsest` up
/// to `finest` subintervals (both powers of two). Column one of the tableau
/// is the composite Simpson rule; later columns remove the `h⁴, h⁶, …` terms
/// of its error expansion, which matters for integrands like `φ|ψ(φ)|²` that
/// are smooth on the closed interval but not periodic. Levels too coarse to
/// resolve the integrand would only inject aliasing error, hence `coarsest`.
pub fn romberg_levels<F>(a: f64, b: f64, coarsest: usize, finest: usize, mut f: F) -> f64
where
    F: FnMut(f64) -> f64,
{
    assert!(
        coarsest.is_power_of_two() && finest.is_power_of_two() && coarsest <= finest,
        "Romberg needs power-of-two grids"
    );
    let levels = (finest / coarsest).trailing_zeros() as usize + 1;
    let mut row: Vec<f64> = Vec::with_capacity(levels);
    let mut prev: Vec<f64> = Vec::with_capacity(levels);
    let mut intervals = coarsest;
    let h0 = (b - a) / intervals as f64;
    let inner: f64 = (1..intervals).map(|j| f(a + j as f64 * h0)).sum();
    let mut trap = h0 * (0.5 * (f(a) + f(b)) + inner);
    prev.push(trap);
    for _ in 1..levels {
        let h = (b - a) / intervals as f64;
        let mid: f64 = (0..intervals).map(|j| f(a + (j as f64 + 0.5) * h)).sum();
        trap = 0.5 * trap + 0.5 * h * mid;
        intervals *= 2;
        row.clear();
        row.push(trap);
        let mut factor = 4.0;
        for (k, p) in prev.iter().enumerate() {
            let next = row[k] + (row[k] - p) / (factor - 1.0);
            row.push(next);
            factor *= 4.0;
        }
        std::mem::swap(&mut row, &mut prev);
    }
    *prev.last().expect("tableau is nonempty")
}

/// [`romberg_levels`] with a five-level tableau ending at `finest`.
pub fn romberg<F>(a: f64, b: f64, finest: usize, f: F) -> f64
where
    F: FnMut(f64) -> f64,
{
    romberg_levels(a, b, (finest / ROMBERG_SPAN).max(1), finest, f)
}

/// Ratio between the finest and coarsest grid in [`romberg`].
pub const ROMBERG_SPAN: usize = 16;

/// [`romberg_levels`] on precomputed samples `values[j] = f(a + j h)`,
/// `j = 0..=finest`.
pub fn romberg_samples(a: f64, b: f64, coarsest: usize, values: &[f64]) -> f64 {
    let finest = values.len() - 1;
    let h = (b - a) / finest as f64;
    romberg_levels(a, b, coarsest, finest, |x| values[((x - a) / h).round() as usize])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_simpson_is_exact_for_trig_polynomials() {
        let v = simpson_periodic(64, |phi| Complex64::from_polar(1.0, 5.0 * phi));
        assert!(v.norm() < 1e-14);
        let one = simpson_periodic(64, |_| Complex64::new(1.0, 0.0));
        assert!((one.re - 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn romberg_integrates_polynomial_weights() {
        // ∫ φ² cos 3φ dφ over [−π, π] = 4π(−1)³/9
        let v = romberg(-PI, PI, 1024, |phi| phi * phi * (3.0 * phi).cos());
        assert!((v + 4.0 * PI / 9.0).abs() < 1e-13);
        let s = simpson(-PI, PI, 1024, |phi| phi * phi * (3.0 * phi).cos());
        assert!((s + 4.0 * PI / 9.0).abs() < 1e-8);
    }

    #[test]
    fn sampled_romberg_matches_closure_form() {
        let f = |phi: f64| (phi * 0.7).exp() * (2.0 * phi).sin();
        let h = 2.0 * PI / 512.0;
        let samples: Vec<f64> = (0..=512).map(|j| f(-PI + j as f64 * h)).collect();
        let a = romberg_samples(-PI, PI, 32, &samples);
        let b = romberg_levels(-PI, PI, 32, 512, f);
        assert_eq!(a, b);
    }
}
