//! Equiripple linear-phase FIR design by the Parks-McClellan (Remez exchange)
//! algorithm.
//!
//! Only odd-length symmetric (Type I) filters are designed. Such a filter has
//! a zero-phase amplitude response
//!
//! ```text
//! A(f) = h[M] + 2 * sum_{n=1..M} h[M+n] cos(2 pi f n),   M = (taps - 1) / 2
//! ```
//!
//! which is a degree-M polynomial in x = cos(2 pi f). Each exchange step
//! levels the weighted error on M + 2 trial extremal frequencies, evaluates the
//! levelled interpolant on a dense grid with the barycentric Lagrange formula,
//! and moves the trial set to the alternating local extrema of the error.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ofdm::OfdmParams;

/// Tap count of the composed filter's high-pass stage.
pub const DEFAULT_HPF_TAPS: usize = 71;

pub const DEFAULT_GRID_DENSITY: usize = 16;
pub const DEFAULT_MAX_ITERATIONS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    /// Lower edge, normalized to the sample rate.
    pub lo: f64,
    /// Upper edge, normalized to the sample rate.
    pub hi: f64,
    pub desired: f64,
    pub weight: f64,
}

impl Band {
    pub fn new(lo: f64, hi: f64, desired: f64, weight: f64) -> Self {
        Band { lo, hi, desired, weight }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirDesignSpec {
    pub num_taps: usize,
    pub bands: Vec<Band>,
    /// Dense grid size as a multiple of `num_taps`.
    pub grid_density: usize,
    pub max_iterations: usize,
}

impl FirDesignSpec {
    pub fn new(num_taps: usize, bands: Vec<Band>) -> Self {
        FirDesignSpec {
            num_taps,
            bands,
            grid_density: DEFAULT_GRID_DENSITY,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(Error::Config(msg));
        if self.num_taps < 3 || self.num_taps % 2 == 0 {
            return cfg(format!("num_taps must be odd and >= 3, got {}", self.num_taps));
        }
        if self.bands.is_empty() {
            return cfg("at least one band is required".into());
        }
        if self.grid_density == 0 || self.max_iterations == 0 {
            return cfg("grid_density and max_iterations must be positive".into());
        }
        for (i, b) in self.bands.iter().enumerate() {
            if !(0.0..=0.5).contains(&b.lo) || !(0.0..=0.5).contains(&b.hi) || b.lo > b.hi {
                return cfg(format!("band {i} edges [{}, {}] must satisfy 0 <= lo <= hi <= 0.5", b.lo, b.hi));
            }
            if !(b.weight.is_finite() && b.weight > 0.0) {
                return cfg(format!("band {i} weight must be positive, got {}", b.weight));
            }
            if !b.desired.is_finite() {
                return cfg(format!("band {i} desired gain must be finite"));
            }
        }
        for (i, w) in self.bands.windows(2).enumerate() {
            if w[0].hi >= w[1].lo {
                return cfg(format!(
                    "bands {i} and {} must be ascending with a non-empty transition between them",
                    i + 1
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirFilter {
    taps: Vec<f64>,
    spec: FirDesignSpec,
    ripple: f64,
    iterations: usize,
    levelled_errors: Vec<f64>,
    extremal_freqs: Vec<f64>,
}

impl FirFilter {
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn spec(&self) -> &FirDesignSpec {
        &self.spec
    }

    /// Largest weighted error on the design grid.
    pub fn ripple(&self) -> f64 {
        self.ripple
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// |delta| of each exchange iteration, in order.
    pub fn levelled_errors(&self) -> &[f64] {
        &self.levelled_errors
    }

    pub fn extremal_freqs(&self) -> &[f64] {
        &self.extremal_freqs
    }

    /// Real zero-phase response A(f), i.e. H(f) with the linear phase term removed.
    pub fn amplitude_response(&self, f: f64) -> f64 {
        let m = (self.taps.len() - 1) / 2;
        let w = 2.0 * PI * f;
        let mut a = self.taps[m];
        for n in 1..=m {
            a += 2.0 * self.taps[m + n] * (w * n as f64).cos();
        }
        a
    }

    pub fn frequency_response(&self, grid: &[f64]) -> Vec<Complex64> {
        frequency_response(&self.taps, grid)
    }
}

/// H(f) = sum_n h[n] exp(-j 2 pi f n) for each normalized frequency in `grid`.
pub fn frequency_response(taps: &[f64], grid: &[f64]) -> Vec<Complex64> {
    grid.iter()
        .map(|&f| {
            taps.iter()
                .enumerate()
                .map(|(n, &h)| Complex64::from_polar(h, -2.0 * PI * f * n as f64))
                .sum()
        })
        .collect()
}

struct GridPoint {
    f: f64,
    x: f64,
    desired: f64,
    weight: f64,
}

fn dense_grid(spec: &FirDesignSpec) -> Vec<(usize, usize)> {
    let total = (spec.grid_density * spec.num_taps) as f64;
    let width: f64 = spec.bands.iter().map(|b| b.hi - b.lo).sum();
    let mut ranges = Vec::with_capacity(spec.bands.len());
    let mut start = 0;
    for b in &spec.bands {
        let count = if b.hi == b.lo {
            1
        } else if width > 0.0 {
            ((total * (b.hi - b.lo) / width).round() as usize).max(2)
        } else {
            2
        };
        ranges.push((start, start + count));
        start += count;
    }
    ranges
}

/// Levelled solution on one trial set of extremal grid points.
struct Levelled {
    delta: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl Levelled {
    fn solve(grid: &[GridPoint], ext: &[usize]) -> Levelled {
        let k = ext.len();
        let xs: Vec<f64> = ext.iter().map(|&i| grid[i].x).collect();
        let full = barycentric_weights(&xs);
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, &gi) in ext.iter().enumerate() {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            num += full[i] * grid[gi].desired;
            den += sign * full[i] / grid[gi].weight;
        }
        let delta = num / den;
        // The degree-M interpolant is pinned down by the first M + 1 nodes.
        let nodes = xs[..k - 1].to_vec();
        let values = ext[..k - 1]
            .iter()
            .enumerate()
            .map(|(i, &gi)| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                grid[gi].desired - sign * delta / grid[gi].weight
            })
            .collect();
        let weights = barycentric_weights(&nodes);
        Levelled {
            delta,
            nodes,
            values,
            weights,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&xi, &ci), &wi) in self.nodes.iter().zip(&self.values).zip(&self.weights) {
            let d = x - xi;
            if d == 0.0 {
                return ci;
            }
            let t = wi / d;
            num += t * ci;
            den += t;
        }
        num / den
    }
}

fn barycentric_weights(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .enumerate()
        .map(|(i, &xi)| {
            xs.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(1.0, |acc, (_, &xj)| acc * 2.0 * (xi - xj))
                .recip()
        })
        .collect()
}

/// Alternating local extrema of `err` with magnitude at least `floor`,
/// trimmed from the ends down to `k` points.
fn select_extrema(err: &[f64], ranges: &[(usize, usize)], floor: f64, k: usize) -> Vec<usize> {
    let mut cands: Vec<usize> = Vec::new();
    for &(s, e) in ranges {
        for j in s..e {
            let v = err[j];
            if v.abs() < floor {
                continue;
            }
            let left = if j > s { err[j - 1] } else { f64::NAN };
            let right = if j + 1 < e { err[j + 1] } else { f64::NAN };
            let is_peak = if v > 0.0 {
                !(left > v) && !(right > v)
            } else {
                !(left < v) && !(right < v)
            };
            if is_peak {
                cands.push(j);
            }
        }
    }
    let mut alt: Vec<usize> = Vec::with_capacity(cands.len());
    for j in cands {
        match alt.last() {
            Some(&last) if (err[last] > 0.0) == (err[j] > 0.0) => {
                if err[j].abs() > err[last].abs() {
                    *alt.last_mut().unwrap() = j;
                }
            }
            _ => alt.push(j),
        }
    }
    while alt.len() > k {
        if err[alt[0]].abs() < err[alt[alt.len() - 1]].abs() {
            alt.remove(0);
        } else {
            alt.pop();
        }
    }
    alt
}

/// Designs the minimax (equiripple) Type I filter for `spec`.
pub fn design_equiripple(spec: &FirDesignSpec) -> Result<FirFilter> {
    spec.validate()?;
    let ranges = dense_grid(spec);
    let mut grid = Vec::new();
    for (b, &(s, e)) in spec.bands.iter().zip(&ranges) {
        let count = e - s;
        for i in 0..count {
            let f = if count == 1 {
                b.lo
            } else {
                b.lo + (b.hi - b.lo) * i as f64 / (count - 1) as f64
            };
            grid.push(GridPoint {
                f,
                x: (2.0 * PI * f).cos(),
                desired: b.desired,
                weight: b.weight,
            });
        }
    }
    let m = (spec.num_taps - 1) / 2;
    let k = m + 2;
    if grid.len() < k {
        return Err(Error::Config(format!(
            "design grid has {} points, fewer than the {k} extremal frequencies needed",
            grid.len()
        )));
    }

    let mut ext: Vec<usize> = (0..k)
        .map(|i| ((i * (grid.len() - 1)) as f64 / (k - 1) as f64).round() as usize)
        .collect();
    let mut levelled_errors = Vec::new();
    let mut converged = None;
    let mut last_ripple = f64::NAN;

    for iteration in 1..=spec.max_iterations {
        let lev = Levelled::solve(&grid, &ext);
        let delta = lev.delta.abs();
        let err: Vec<f64> = grid.iter().map(|p| p.weight * (p.desired - lev.eval(p.x))).collect();
        let max_err = err.iter().fold(0.0f64, |a, e| a.max(e.abs()));
        last_ripple = max_err;
        let prev = levelled_errors.last().copied();
        levelled_errors.push(delta);

        if max_err <= 1e-12 {
            converged = Some((iteration, lev));
            break;
        }
        let next = select_extrema(&err, &ranges, delta * (1.0 - 1e-9), k);
        if next.len() < k {
            return Err(Error::Design {
                iterations: iteration,
                ripple: max_err,
            });
        }
        let stable = next == ext;
        let settled = prev.is_some_and(|p| (delta - p).abs() <= 1e-6 * delta);
        if stable || settled {
            converged = Some((iteration, lev));
            break;
        }
        ext = next;
    }

    let (iterations, lev) = converged.ok_or(Error::Design {
        iterations: spec.max_iterations,
        ripple: last_ripple,
    })?;

    let t = spec.num_taps as f64;
    let samples: Vec<f64> = (0..=m).map(|j| lev.eval((2.0 * PI * j as f64 / t).cos())).collect();
    let mut taps = vec![0.0; spec.num_taps];
    for n in 0..=m {
        let mut acc = samples[0];
        for (j, &a) in samples.iter().enumerate().skip(1) {
            acc += 2.0 * a * (2.0 * PI * (j * n) as f64 / t).cos();
        }
        taps[m + n] = acc / t;
        taps[m - n] = acc / t;
    }

    let mut filter = FirFilter {
        taps,
        spec: spec.clone(),
        ripple: 0.0,
        iterations,
        levelled_errors,
        extremal_freqs: ext.iter().map(|&i| grid[i].f).collect(),
    };
    filter.ripple = grid
        .iter()
        .map(|p| (p.weight * (p.desired - filter.amplitude_response(p.f))).abs())
        .fold(0.0, f64::max);
    Ok(filter)
}

/// Band plan of the composed filter's high-pass stage: stop below
/// f_c - 0.75 BW, pass from f_c - 0.5 BW up to f_s / 2, equal weights.
pub fn default_hpf_spec(params: &OfdmParams, num_taps: usize) -> Result<FirDesignSpec> {
    let fs = params.sample_hz();
    let stop = (params.carrier_hz() - 0.75 * params.bandwidth_hz()) / fs;
    let pass = (params.carrier_hz() - 0.5 * params.bandwidth_hz()) / fs;
    hpf_spec(stop, pass, num_taps)
}

pub fn hpf_spec(stop_edge: f64, pass_edge: f64, num_taps: usize) -> Result<FirDesignSpec> {
    if !(stop_edge > 0.0 && stop_edge < pass_edge && pass_edge < 0.5) {
        return Err(Error::Config(format!(
            "high-pass edges must satisfy 0 < stop ({stop_edge}) < pass ({pass_edge}) < 0.5"
        )));
    }
    Ok(FirDesignSpec::new(
        num_taps,
        vec![Band::new(0.0, stop_edge, 0.0, 1.0), Band::new(pass_edge, 0.5, 1.0, 1.0)],
    ))
}

/// Band plan of the receiver's image-reject low-pass filter: pass up to
/// BW / 2, stop from f_c, equal weights.
pub fn image_reject_lpf_spec(params: &OfdmParams, num_taps: usize) -> Result<FirDesignSpec> {
    let fs = params.sample_hz();
    let pass = 0.5 * params.bandwidth_hz() / fs;
    let stop = params.carrier_hz() / fs;
    if !(pass < stop && stop < 0.5) {
        return Err(Error::Config(format!(
            "image-reject filter edges must satisfy pass ({pass}) < stop ({stop}) < 0.5"
        )));
    }
    Ok(FirDesignSpec::new(
        num_taps,
        vec![Band::new(0.0, pass, 1.0, 1.0), Band::new(stop, 0.5, 0.0, 1.0)],
    ))
}

pub fn design_default_hpf(params: &OfdmParams, num_taps: usize) -> Result<FirFilter> {
    design_equiripple(&default_hpf_spec(params, num_taps)?)
}

pub fn design_image_reject_lpf(params: &OfdmParams, num_taps: usize) -> Result<FirFilter> {
    design_equiripple(&image_reject_lpf_spec(params, num_taps)?)
}
