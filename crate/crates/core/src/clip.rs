//! Amplitude clipping and the FFT/IFFT composed filter.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::fir::FirFilter;
use crate::ofdm::{BasebandSignal, OfdmParams, PassbandSignal, Signal};

/// Clip level derived from a clipping ratio: A = CR * sigma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClipConfig {
    cr: f64,
    sigma: f64,
    amplitude: f64,
}

impl ClipConfig {
    pub fn new(cr: f64, sigma: f64) -> Result<Self> {
        if !(cr > 0.0) {
            return Err(Error::Config(format!("clipping ratio must be positive, got {cr}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Config(format!("signal RMS must be positive and finite, got {sigma}")));
        }
        Ok(ClipConfig {
            cr,
            sigma,
            amplitude: cr * sigma,
        })
    }

    pub fn cr(&self) -> f64 {
        self.cr
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }
}

pub fn rms<S: Signal>(signal: &S) -> Result<f64> {
    if signal.is_empty() {
        return Err(Error::Shape("RMS of an empty signal".into()));
    }
    Ok(signal.mean_power().sqrt())
}

fn check_amplitude(amplitude: f64) -> Result<()> {
    if !(amplitude > 0.0) {
        return Err(Error::Config(format!("clip amplitude must be positive, got {amplitude}")));
    }
    Ok(())
}

/// Hard limiter on a real signal: values are held to [-A, A].
pub fn clip_passband(signal: &PassbandSignal, amplitude: f64) -> Result<PassbandSignal> {
    check_amplitude(amplitude)?;
    Ok(PassbandSignal {
        samples: signal.samples.iter().map(|&x| x.clamp(-amplitude, amplitude)).collect(),
        sample_hz: signal.sample_hz,
    })
}

/// Envelope limiter on a complex signal: magnitudes above A are set to A,
/// phases are kept.
pub fn clip_baseband(signal: &BasebandSignal, amplitude: f64) -> Result<BasebandSignal> {
    check_amplitude(amplitude)?;
    Ok(BasebandSignal {
        samples: signal
            .samples
            .iter()
            .map(|&x| {
                let mag = x.norm();
                if mag > amplitude {
                    x * (amplitude / mag)
                } else {
                    x
                }
            })
            .collect(),
        sample_hz: signal.sample_hz,
    })
}

/// FFT -> high-pass weighting of the in-band bins -> zeroing of every other
/// bin -> IFFT, applied to one real passband symbol of N * L samples.
///
/// The in-band bins are the passband image of the zero-insertion layout:
/// subcarrier offsets -(N/2 - 1)..=N/2 around the carrier bin, plus their
/// mirror in the negative half. The high-pass stage contributes its zero-phase
/// amplitude response, so filtering does not shift the symbol in time.
#[derive(Clone)]
pub struct ComposedFilter {
    params: OfdmParams,
    /// Per-bin gain; exactly zero outside the occupied band.
    gains: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for ComposedFilter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ComposedFilter").field("params", &self.params).finish_non_exhaustive()
    }
}

impl ComposedFilter {
    pub fn new(params: OfdmParams, hpf: &FirFilter) -> Self {
        let nl = params.fft_len();
        let mut gains = vec![0.0; nl];
        for k in 0..params.n_subcarriers() {
            let bin = (params.carrier_bin() as i64 + params.subcarrier_offset(k)) as usize;
            let g = hpf.amplitude_response(bin as f64 / nl as f64);
            gains[bin] = g;
            gains[nl - bin] = g;
        }
        let mut planner = FftPlanner::new();
        ComposedFilter {
            params,
            gains,
            forward: planner.plan_fft_forward(nl),
            inverse: planner.plan_fft_inverse(nl),
        }
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    /// Indices of the bins that survive filtering, positive half first.
    pub fn in_band_bins(&self) -> Vec<usize> {
        let nl = self.params.fft_len();
        let mut pos: Vec<usize> = (0..self.params.n_subcarriers())
            .map(|k| (self.params.carrier_bin() as i64 + self.params.subcarrier_offset(k)) as usize)
            .collect();
        pos.sort_unstable();
        let neg: Vec<usize> = pos.iter().rev().map(|&b| nl - b).collect();
        pos.extend(neg);
        pos
    }

    pub fn apply(&self, signal: &PassbandSignal) -> Result<PassbandSignal> {
        let nl = self.params.fft_len();
        if signal.samples.len() != nl {
            return Err(Error::Shape(format!(
                "composed filter works on one {nl}-sample symbol, got {} samples",
                signal.samples.len()
            )));
        }
        let mut buf: Vec<Complex64> = signal.samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward.process(&mut buf);
        for (x, &g) in buf.iter_mut().zip(&self.gains) {
            *x *= g;
        }
        // force exact conjugate symmetry so the inverse is real
        buf[0] = Complex64::new(buf[0].re, 0.0);
        buf[nl / 2] = Complex64::new(buf[nl / 2].re, 0.0);
        for k in 1..nl / 2 {
            buf[nl - k] = buf[k].conj();
        }
        self.inverse.process(&mut buf);
        let scale = (nl as f64).recip();
        Ok(PassbandSignal {
            samples: buf.iter().map(|x| x.re * scale).collect(),
            sample_hz: signal.sample_hz,
        })
    }
}

pub fn composed_filter(signal: &PassbandSignal, params: &OfdmParams, hpf: &FirFilter) -> Result<PassbandSignal> {
    ComposedFilter::new(*params, hpf).apply(signal)
}
