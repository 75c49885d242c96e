//! Oversampled-IFFT OFDM modulation, cyclic prefix handling and digital
//! up/down-conversion between complex baseband and real passband.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::fir::{self, FirFilter};

/// Number of taps of the receiver's image-reject low-pass filter.
pub const DEFAULT_LPF_TAPS: usize = 31;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfdmParams {
    n_subcarriers: usize,
    oversample: usize,
    bandwidth_hz: f64,
    carrier_hz: f64,
    cp_len: usize,
}

impl OfdmParams {
    /// Validates and builds a parameter set. The sample rate is always
    /// `bandwidth_hz * oversample`.
    pub fn new(
        n_subcarriers: usize,
        oversample: usize,
        bandwidth_hz: f64,
        carrier_hz: f64,
        cp_len: usize,
    ) -> Result<Self> {
        let p = OfdmParams {
            n_subcarriers,
            oversample,
            bandwidth_hz,
            carrier_hz,
            cp_len,
        };
        p.validate()?;
        Ok(p)
    }

    /// 128 subcarriers, 8x oversampling, 1 MHz bandwidth, 2 MHz carrier and a
    /// 32-sample guard interval.
    pub fn reference() -> Self {
        OfdmParams {
            n_subcarriers: 128,
            oversample: 8,
            bandwidth_hz: 1e6,
            carrier_hz: 2e6,
            cp_len: 32,
        }
    }

    fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(Error::Config(msg));
        if self.n_subcarriers < 2 || self.n_subcarriers % 2 != 0 {
            return cfg(format!("n_subcarriers must be even and >= 2, got {}", self.n_subcarriers));
        }
        if self.oversample < 1 {
            return cfg("oversample must be >= 1".into());
        }
        if !(self.bandwidth_hz.is_finite() && self.bandwidth_hz > 0.0) {
            return cfg(format!("bandwidth_hz must be positive, got {}", self.bandwidth_hz));
        }
        if self.cp_len > self.n_subcarriers {
            return cfg(format!(
                "cp_len must not exceed n_subcarriers ({} > {})",
                self.cp_len, self.n_subcarriers
            ));
        }
        if !(self.carrier_hz.is_finite() && self.carrier_hz > 0.0) {
            return cfg(format!("carrier_hz must be positive, got {}", self.carrier_hz));
        }
        let top = self.carrier_hz + self.bandwidth_hz / 2.0;
        if top >= self.sample_hz() / 2.0 {
            return cfg(format!(
                "carrier_hz + bandwidth_hz/2 = {top} Hz must stay below the Nyquist frequency {} Hz",
                self.sample_hz() / 2.0
            ));
        }
        if self.carrier_hz <= self.bandwidth_hz / 2.0 {
            return cfg(format!(
                "carrier_hz must exceed bandwidth_hz/2 so the passband stays clear of DC, got {}",
                self.carrier_hz
            ));
        }
        let bin = self.carrier_hz / self.subcarrier_spacing_hz();
        if (bin - bin.round()).abs() > 1e-9 * bin.max(1.0) {
            return cfg(format!(
                "carrier_hz must be a multiple of the subcarrier spacing {} Hz",
                self.subcarrier_spacing_hz()
            ));
        }
        Ok(())
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }

    pub fn carrier_hz(&self) -> f64 {
        self.carrier_hz
    }

    pub fn cp_len(&self) -> usize {
        self.cp_len
    }

    pub fn sample_hz(&self) -> f64 {
        self.bandwidth_hz * self.oversample as f64
    }

    pub fn subcarrier_spacing_hz(&self) -> f64 {
        self.bandwidth_hz / self.n_subcarriers as f64
    }

    pub fn symbol_interval_s(&self) -> f64 {
        1.0 / self.subcarrier_spacing_hz()
    }

    /// Samples per OFDM symbol at the oversampled rate, N * L.
    pub fn fft_len(&self) -> usize {
        self.n_subcarriers * self.oversample
    }

    /// Guard interval length at the oversampled rate.
    pub fn cp_samples(&self) -> usize {
        self.cp_len * self.oversample
    }

    /// DFT bin of the carrier within one oversampled symbol.
    pub fn carrier_bin(&self) -> usize {
        (self.carrier_hz / self.subcarrier_spacing_hz()).round() as usize
    }

    /// Oversampled-frame bin carrying subcarrier `k` under the
    /// zero-insertion layout: 0..=N/2 stay put, the rest move to the top.
    pub fn subcarrier_bin(&self, k: usize) -> usize {
        let n = self.n_subcarriers;
        if k <= n / 2 {
            k
        } else {
            self.fft_len() - n + k
        }
    }

    /// Signed baseband frequency index (in subcarrier spacings) of subcarrier `k`.
    pub fn subcarrier_offset(&self, k: usize) -> i64 {
        let n = self.n_subcarriers;
        if k <= n / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        }
    }
}

/// A sequence of frequency-domain bins, either N subcarrier values or the
/// N * L bins of a zero-extended frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqFrame {
    bins: Vec<Complex64>,
}

impl FreqFrame {
    pub fn new(bins: Vec<Complex64>) -> Self {
        FreqFrame { bins }
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn into_bins(self) -> Vec<Complex64> {
        self.bins
    }
}

/// Common view over real and complex sample sequences.
pub trait Signal: Sized {
    type Sample: Copy;

    fn samples(&self) -> &[Self::Sample];
    fn sample_hz(&self) -> f64;
    fn from_parts(samples: Vec<Self::Sample>, sample_hz: f64) -> Self;
    /// Instantaneous power |x|^2 of one sample.
    fn power(sample: Self::Sample) -> f64;

    fn len(&self) -> usize {
        self.samples().len()
    }

    fn is_empty(&self) -> bool {
        self.samples().is_empty()
    }

    fn mean_power(&self) -> f64 {
        self.samples().iter().map(|&s| Self::power(s)).sum::<f64>() / self.len() as f64
    }

    fn peak_power(&self) -> f64 {
        self.samples().iter().map(|&s| Self::power(s)).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasebandSignal {
    pub samples: Vec<Complex64>,
    pub sample_hz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PassbandSignal {
    pub samples: Vec<f64>,
    pub sample_hz: f64,
}

impl Signal for BasebandSignal {
    type Sample = Complex64;

    fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    fn sample_hz(&self) -> f64 {
        self.sample_hz
    }

    fn from_parts(samples: Vec<Complex64>, sample_hz: f64) -> Self {
        BasebandSignal { samples, sample_hz }
    }

    fn power(sample: Complex64) -> f64 {
        sample.norm_sqr()
    }
}

impl Signal for PassbandSignal {
    type Sample = f64;

    fn samples(&self) -> &[f64] {
        &self.samples
    }

    fn sample_hz(&self) -> f64 {
        self.sample_hz
    }

    fn from_parts(samples: Vec<f64>, sample_hz: f64) -> Self {
        PassbandSignal { samples, sample_hz }
    }

    fn power(sample: f64) -> f64 {
        sample * sample
    }
}

/// Inserts N(L-1) zeros in the middle of an N-bin frame.
pub fn oversample_extend(frame: &FreqFrame, oversample: usize) -> Result<FreqFrame> {
    let n = frame.len();
    if n < 2 || n % 2 != 0 {
        return Err(Error::Config(format!("frame length must be even and >= 2, got {n}")));
    }
    if oversample < 1 {
        return Err(Error::Config("oversampling factor must be >= 1".into()));
    }
    let nl = n * oversample;
    let mut bins = vec![Complex64::new(0.0, 0.0); nl];
    bins[..=n / 2].copy_from_slice(&frame.bins[..=n / 2]);
    bins[nl - n / 2 + 1..].copy_from_slice(&frame.bins[n / 2 + 1..]);
    Ok(FreqFrame { bins })
}

/// Holds FFT plans for one OFDM symbol length.
#[derive(Clone)]
pub struct OfdmModem {
    params: OfdmParams,
    inverse: Arc<dyn Fft<f64>>,
    forward: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for OfdmModem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OfdmModem").field("params", &self.params).finish_non_exhaustive()
    }
}

impl OfdmModem {
    pub fn new(params: OfdmParams) -> Self {
        let mut planner = FftPlanner::new();
        let nl = params.fft_len();
        OfdmModem {
            params,
            inverse: planner.plan_fft_inverse(nl),
            forward: planner.plan_fft_forward(nl),
        }
    }

    pub fn params(&self) -> &OfdmParams {
        &self.params
    }

    /// N subcarrier symbols -> zero-extended frame -> baseband samples.
    pub fn modulate_symbols(&self, symbols: &[Complex64]) -> Result<BasebandSignal> {
        if symbols.len() != self.params.n_subcarriers {
            return Err(Error::Shape(format!(
                "expected {} subcarrier symbols, got {}",
                self.params.n_subcarriers,
                symbols.len()
            )));
        }
        let frame = oversample_extend(&FreqFrame::new(symbols.to_vec()), self.params.oversample)?;
        self.modulate(&frame)
    }

    /// x[m] = 1/sqrt(NL) * sum_k X[k] exp(j 2 pi m k / NL)
    pub fn modulate(&self, frame: &FreqFrame) -> Result<BasebandSignal> {
        let nl = self.params.fft_len();
        if frame.len() != nl {
            return Err(Error::Shape(format!("expected a {nl}-bin frame, got {}", frame.len())));
        }
        let mut buf = frame.bins.clone();
        self.inverse.process(&mut buf);
        let scale = (nl as f64).sqrt().recip();
        buf.iter_mut().for_each(|x| *x *= scale);
        Ok(BasebandSignal {
            samples: buf,
            sample_hz: self.params.sample_hz(),
        })
    }

    /// Unitary forward DFT of one oversampled symbol.
    pub fn spectrum(&self, signal: &BasebandSignal) -> Result<Vec<Complex64>> {
        let nl = self.params.fft_len();
        if signal.samples.len() != nl {
            return Err(Error::Shape(format!(
                "expected {nl} samples per symbol, got {}",
                signal.samples.len()
            )));
        }
        let mut buf = signal.samples.clone();
        self.forward.process(&mut buf);
        let scale = (nl as f64).sqrt().recip();
        buf.iter_mut().for_each(|x| *x *= scale);
        Ok(buf)
    }

    /// Recovers the N subcarrier values from one oversampled symbol.
    pub fn demodulate(&self, signal: &BasebandSignal) -> Result<Vec<Complex64>> {
        let spec = self.spectrum(signal)?;
        Ok((0..self.params.n_subcarriers)
            .map(|k| spec[self.params.subcarrier_bin(k)])
            .collect())
    }
}

pub fn ofdm_modulate(frame: &FreqFrame, params: &OfdmParams) -> Result<BasebandSignal> {
    OfdmModem::new(*params).modulate(frame)
}

pub fn ofdm_demodulate(signal: &BasebandSignal, params: &OfdmParams) -> Result<Vec<Complex64>> {
    OfdmModem::new(*params).demodulate(signal)
}

pub fn add_cyclic_prefix<S: Signal>(signal: &S, cp_samples: usize) -> Result<S> {
    let x = signal.samples();
    if cp_samples > x.len() {
        return Err(Error::Shape(format!(
            "cyclic prefix of {cp_samples} samples exceeds the {}-sample symbol",
            x.len()
        )));
    }
    let mut out = Vec::with_capacity(x.len() + cp_samples);
    out.extend_from_slice(&x[x.len() - cp_samples..]);
    out.extend_from_slice(x);
    Ok(S::from_parts(out, signal.sample_hz()))
}

pub fn remove_cyclic_prefix<S: Signal>(signal: &S, cp_samples: usize) -> Result<S> {
    let x = signal.samples();
    if x.len() <= cp_samples {
        return Err(Error::Shape(format!(
            "signal of {} samples is not longer than the {cp_samples}-sample prefix",
            x.len()
        )));
    }
    Ok(S::from_parts(x[cp_samples..].to_vec(), signal.sample_hz()))
}

/// x_p[m] = sqrt(2) Re{ x[m] exp(j 2 pi f_c m / f_s) }; the sqrt(2) keeps the
/// passband mean power equal to the baseband mean power.
pub fn upconvert(signal: &BasebandSignal, carrier_hz: f64, bandwidth_hz: f64) -> Result<PassbandSignal> {
    check_carrier(carrier_hz, bandwidth_hz, signal.sample_hz)?;
    let w = 2.0 * PI * carrier_hz / signal.sample_hz;
    let samples = signal
        .samples
        .iter()
        .enumerate()
        .map(|(m, x)| SQRT_2 * (x * Complex64::from_polar(1.0, w * m as f64)).re)
        .collect();
    Ok(PassbandSignal {
        samples,
        sample_hz: signal.sample_hz,
    })
}

fn check_carrier(carrier_hz: f64, bandwidth_hz: f64, sample_hz: f64) -> Result<()> {
    if !(carrier_hz >= 0.0 && carrier_hz + bandwidth_hz / 2.0 < sample_hz / 2.0) {
        return Err(Error::Config(format!(
            "carrier {carrier_hz} Hz with bandwidth {bandwidth_hz} Hz does not fit below the Nyquist frequency {} Hz",
            sample_hz / 2.0
        )));
    }
    Ok(())
}

/// Quadrature mixer followed by a zero-phase image-reject low-pass filter.
///
/// The block handed to [`Downconverter::process`] is filtered as one period
/// of a periodic signal (circular convolution with the centred taps), which
/// is exact for one OFDM symbol with its cyclic prefix already removed.
#[derive(Clone)]
pub struct Downconverter {
    params: OfdmParams,
    lpf: FirFilter,
    /// LPF amplitude response on the N*L symbol grid.
    response: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Downconverter {
    pub fn new(params: OfdmParams) -> Result<Self> {
        let lpf = fir::design_image_reject_lpf(&params, DEFAULT_LPF_TAPS)?;
        Ok(Self::with_filter(params, lpf))
    }

    pub fn with_filter(params: OfdmParams, lpf: FirFilter) -> Self {
        let nl = params.fft_len();
        let response = bin_response(&lpf, nl);
        let mut planner = FftPlanner::new();
        Downconverter {
            params,
            lpf,
            response,
            forward: planner.plan_fft_forward(nl),
            inverse: planner.plan_fft_inverse(nl),
        }
    }

    pub fn lpf(&self) -> &FirFilter {
        &self.lpf
    }

    pub fn process(&self, signal: &PassbandSignal) -> Result<BasebandSignal> {
        check_carrier(self.params.carrier_hz, self.params.bandwidth_hz, signal.sample_hz)?;
        let n = signal.samples.len();
        let w = -2.0 * PI * self.params.carrier_hz / signal.sample_hz;
        let mut buf: Vec<Complex64> = signal
            .samples
            .iter()
            .enumerate()
            .map(|(m, &x)| Complex64::from_polar(SQRT_2 * x, w * m as f64))
            .collect();
        if n == self.params.fft_len() {
            self.forward.process(&mut buf);
            apply_response(&mut buf, &self.response);
            self.inverse.process(&mut buf);
        } else if n > 0 {
            let mut planner = FftPlanner::new();
            planner.plan_fft_forward(n).process(&mut buf);
            apply_response(&mut buf, &bin_response(&self.lpf, n));
            planner.plan_fft_inverse(n).process(&mut buf);
        }
        let scale = (n.max(1) as f64).recip();
        buf.iter_mut().for_each(|x| *x *= scale);
        Ok(BasebandSignal {
            samples: buf,
            sample_hz: signal.sample_hz,
        })
    }
}

fn apply_response(buf: &mut [Complex64], response: &[f64]) {
    buf.iter_mut().zip(response).for_each(|(x, &g)| *x *= g);
}

/// Zero-phase amplitude response of `filter` at the n DFT bin frequencies.
pub(crate) fn bin_response(filter: &FirFilter, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let f = k.min(n - k) as f64 / n as f64;
            filter.amplitude_response(f)
        })
        .collect()
}

pub fn downconvert(signal: &PassbandSignal, carrier_hz: f64, params: &OfdmParams) -> Result<BasebandSignal> {
    let mut p = *params;
    p.carrier_hz = carrier_hz;
    p.validate()?;
    Downconverter::new(p)?.process(signal)
}
