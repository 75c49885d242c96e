//! PAPR, empirical CCDF and bit-error counting.

use crate::error::{Error, Result};
use crate::ofdm::Signal;

/// 10 log10(max |x|^2 / mean |x|^2) over one symbol.
pub fn papr_db<S: Signal>(signal: &S) -> Result<f64> {
    if signal.is_empty() {
        return Err(Error::Shape("PAPR of an empty signal".into()));
    }
    let mean = signal.mean_power();
    if mean == 0.0 {
        return Err(Error::UndefinedMetric("PAPR of an all-zero signal".into()));
    }
    Ok(10.0 * (signal.peak_power() / mean).log10())
}

/// Empirical P(PAPR > threshold) on an ascending threshold grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfCurve {
    pub thresholds_db: Vec<f64>,
    pub prob_exceed: Vec<f64>,
    pub sample_count: usize,
}

/// `count` thresholds from `lo` in steps of `step` dB.
pub fn threshold_grid(lo: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| lo + step * i as f64).collect()
}

pub fn estimate_ccdf(values_db: &[f64], thresholds_db: &[f64]) -> Result<CcdfCurve> {
    if values_db.is_empty() {
        return Err(Error::Shape("CCDF of an empty sample set".into()));
    }
    if thresholds_db.is_empty() || thresholds_db.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Shape("CCDF thresholds must be non-empty and strictly ascending".into()));
    }
    let mut sorted = values_db.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let prob_exceed = thresholds_db
        .iter()
        .map(|&t| {
            let at_or_below = sorted.partition_point(|&v| v <= t);
            (sorted.len() - at_or_below) as f64 / n
        })
        .collect();
    Ok(CcdfCurve {
        thresholds_db: thresholds_db.to_vec(),
        prob_exceed,
        sample_count: values_db.len(),
    })
}

/// Smallest threshold whose exceedance probability is at most `p`,
/// interpolated linearly between the two bracketing grid points.
pub fn ccdf_quantile(curve: &CcdfCurve, p: f64) -> Result<f64> {
    let probs = &curve.prob_exceed;
    let (Some(&max), Some(&min)) = (probs.first(), probs.last()) else {
        return Err(Error::Shape("empty CCDF curve".into()));
    };
    if !(p > 0.0 && p < 1.0) || p > max || p < min {
        return Err(Error::OutOfRange { p, min, max });
    }
    let i = probs.partition_point(|&q| q > p);
    if i == 0 {
        return Ok(curve.thresholds_db[0]);
    }
    let (t0, t1) = (curve.thresholds_db[i - 1], curve.thresholds_db[i]);
    let (p0, p1) = (probs[i - 1], probs[i]);
    Ok(t0 + (p - p0) * (t1 - t0) / (p1 - p0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ErrorCount {
    pub errors: u64,
    pub total: u64,
}

impl ErrorCount {
    pub fn ber(&self) -> f64 {
        self.errors as f64 / self.total as f64
    }

    pub fn merge(self, other: ErrorCount) -> ErrorCount {
        ErrorCount {
            errors: self.errors + other.errors,
            total: self.total + other.total,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub ebn0_db: f64,
    pub count: ErrorCount,
}

impl BerPoint {
    pub fn ber(&self) -> f64 {
        self.count.ber()
    }
}

pub fn count_bit_errors(tx_bits: &[u8], rx_bits: &[u8]) -> Result<ErrorCount> {
    if tx_bits.len() != rx_bits.len() {
        return Err(Error::Shape(format!(
            "bit sequences differ in length ({} vs {})",
            tx_bits.len(),
            rx_bits.len()
        )));
    }
    if tx_bits.is_empty() {
        return Err(Error::Shape("cannot count errors on empty bit sequences".into()));
    }
    let errors = tx_bits.iter().zip(rx_bits).filter(|(a, b)| (*a ^ *b) & 1 != 0).count();
    Ok(ErrorCount {
        errors: errors as u64,
        total: tx_bits.len() as u64,
    })
}
