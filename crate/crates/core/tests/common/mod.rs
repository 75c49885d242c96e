#![allow(dead_code)]

use std::f64::consts::PI;

use clipofdm::fir::FirDesignSpec;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Dense grid spread over the bands in proportion to their widths, band
/// edges included. Returns (frequency, desired, weight) triples.
pub fn band_grid(spec: &FirDesignSpec, points: usize) -> Vec<(f64, f64, f64)> {
    let total: f64 = spec.bands.iter().map(|b| b.hi - b.lo).sum();
    let mut grid = Vec::with_capacity(points);
    for b in &spec.bands {
        let n = ((points as f64 * (b.hi - b.lo) / total).round() as usize).max(2);
        for i in 0..n {
            let f = b.lo + (b.hi - b.lo) * i as f64 / (n - 1) as f64;
            grid.push((f, b.desired, b.weight));
        }
    }
    grid
}

/// Minimax weighted error of a Type I filter of `spec.num_taps` taps on a
/// dense grid, by Lawson's iteratively reweighted least squares. The best
/// maximum error seen over the iterations is returned.
pub fn lawson_minimax(spec: &FirDesignSpec, points: usize, iterations: usize) -> f64 {
    let grid = band_grid(spec, points);
    let m = (spec.num_taps - 1) / 2;
    let basis = DMatrix::from_fn(grid.len(), m + 1, |i, n| (2.0 * PI * grid[i].0 * n as f64).cos());
    let mut w = vec![1.0 / grid.len() as f64; grid.len()];
    let mut best = f64::INFINITY;
    for _ in 0..iterations {
        let scale: Vec<f64> = grid.iter().zip(&w).map(|(g, wi)| wi.sqrt() * g.2).collect();
        let a = DMatrix::from_fn(grid.len(), m + 1, |i, n| basis[(i, n)] * scale[i]);
        let b = DVector::from_fn(grid.len(), |i, _| grid[i].1 * scale[i]);
        let coeffs = a.svd(true, true).solve(&b, 1e-14).expect("least-squares solve");
        let err: Vec<f64> = (0..grid.len())
            .map(|i| {
                let amp: f64 = (0..=m).map(|n| basis[(i, n)] * coeffs[n]).sum();
                grid[i].2 * (amp - grid[i].1)
            })
            .collect();
        let max = err.iter().fold(0.0f64, |acc, e| acc.max(e.abs()));
        best = best.min(max);
        let mut total = 0.0;
        for (wi, e) in w.iter_mut().zip(&err) {
            *wi *= e.abs();
            total += *wi;
        }
        for wi in &mut w {
            *wi /= total;
        }
    }
    best
}

/// x[m] = 1/sqrt(n) sum_k X[k] exp(j 2 pi m k / n), summed term by term.
pub fn direct_idft(bins: &[Complex64]) -> Vec<Complex64> {
    let n = bins.len();
    let scale = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|m| {
            bins.iter()
                .enumerate()
                .map(|(k, &x)| x * Complex64::from_polar(1.0, 2.0 * PI * ((m * k) % n) as f64 / n as f64))
                .sum::<Complex64>()
                * scale
        })
        .collect()
}

/// Standard deviation of a binomial proportion estimate.
pub fn binomial_sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}
