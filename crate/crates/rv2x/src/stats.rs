//! Summary statistics over simulated records.

use crate::absorption::DeconvEstimate;
use crate::channel::ErrorDistribution;

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Empirical CDF at each grid point. Infinite values count as larger than
/// every grid point.
pub fn cdf_on_grid(values: &[f64], grid: &[f64]) -> Vec<f64> {
    if values.is_empty() {
        return vec![0.0; grid.len()];
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    grid.iter()
        .map(|&x| sorted.partition_point(|&v| v <= x) as f64 / n)
        .collect()
}

/// Empirical complementary CDF `P{X > x}` at each grid point.
pub fn ccdf_on_grid(values: &[f64], grid: &[f64]) -> Vec<f64> {
    cdf_on_grid(values, grid)
        .into_iter()
        .map(|p| 1.0 - p)
        .collect()
}

pub fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    Some(if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    })
}

/// Mean of the finite values strictly above `threshold`.
pub fn conditional_mean_above(values: &[f64], threshold: f64) -> Option<f64> {
    let above: Vec<f64> = values
        .iter()
        .copied()
        .filter(|v| v.is_finite() && *v > threshold)
        .collect();
    mean(&above)
}

/// Trapezoid rule over tabulated points.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Grid covering the bulk of the true law, widened by half a unit.
pub fn density_grid(law: &ErrorDistribution, points: usize) -> Vec<f64> {
    let (lo, hi) = law.support();
    linspace(lo - 0.5, hi + 0.5, points)
}

/// Integrated squared error of the raw estimate against the true density
/// over the grid.
pub fn integrated_squared_error(
    est: &DeconvEstimate,
    law: &ErrorDistribution,
    grid: &[f64],
) -> f64 {
    let sq: Vec<f64> = grid
        .iter()
        .map(|&e| (est.pdf(e) - law.pdf(e)).powi(2))
        .collect();
    trapezoid(grid, &sq)
}
