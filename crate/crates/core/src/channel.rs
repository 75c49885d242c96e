//! Additive white Gaussian noise at the passband sample rate, calibrated in
//! Eb/N0.
//!
//! # Calibration
//!
//! Let P be the mean power of the real passband samples and L the
//! oversampling factor. With the unitary transforms of [`crate::ofdm`] and
//! the sqrt(2) up/down-conversion, P = Es / L, where Es is the mean energy of
//! one subcarrier symbol, so Es = P L = P / occupied_fraction.
//!
//! Real white noise of variance s^2 per sample becomes, after the sqrt(2)
//! quadrature mixer and the unitary DFT, complex noise of variance 2 s^2 on
//! every subcarrier bin, i.e. N0 = 2 s^2. With Es = k Eb for k bits per
//! symbol, and an optional factor c = N / (N + cp_len) that charges the cyclic
//! prefix energy to the useful bits,
//!
//! ```text
//! Eb/N0 = c Es / (k N0)   =>   s^2 = P L / (2 k c Eb/N0)
//! ```
//!
//! Noise outside the occupied band is removed by the receiver's DFT bin
//! selection and does not affect the decisions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::ofdm::PassbandSignal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    pub ebn0_db: f64,
    pub bits_per_symbol: usize,
    /// N / (N L): share of the sampled bandwidth that carries subcarriers.
    pub occupied_fraction: f64,
    /// N / (N + cp_len) when prefix energy is charged to the bits, else 1.
    pub cp_overhead: f64,
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.ebn0_db.is_finite() && self.ebn0_db != f64::INFINITY {
            return Err(Error::Config(format!("Eb/N0 must be a number, got {}", self.ebn0_db)));
        }
        if self.bits_per_symbol < 1 {
            return Err(Error::Config("bits_per_symbol must be >= 1".into()));
        }
        for (name, v) in [("occupied_fraction", self.occupied_fraction), ("cp_overhead", self.cp_overhead)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

/// Per-sample standard deviation of the real passband noise.
pub fn noise_sigma(config: &NoiseConfig, signal_power: f64) -> Result<f64> {
    config.validate()?;
    if !(signal_power > 0.0 && signal_power.is_finite()) {
        return Err(Error::Config(format!("signal power must be positive, got {signal_power}")));
    }
    let ebn0 = 10f64.powf(config.ebn0_db / 10.0);
    let es = signal_power / config.occupied_fraction;
    let variance = es / (2.0 * config.bits_per_symbol as f64 * config.cp_overhead * ebn0);
    Ok(variance.sqrt())
}

/// Generator for one independent stream of a seeded experiment.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn add_awgn_with<R: rand::Rng + ?Sized>(signal: &PassbandSignal, sigma_n: f64, rng: &mut R) -> Result<PassbandSignal> {
    if !(sigma_n >= 0.0) {
        return Err(Error::Config(format!("noise deviation must be non-negative, got {sigma_n}")));
    }
    if sigma_n == 0.0 {
        return Ok(signal.clone());
    }
    let normal = Normal::new(0.0, sigma_n).map_err(|e| Error::Config(e.to_string()))?;
    Ok(PassbandSignal {
        samples: signal.samples.iter().map(|&x| x + normal.sample(rng)).collect(),
        sample_hz: signal.sample_hz,
    })
}

/// Adds N(0, sigma_n^2) noise drawn from a ChaCha8 stream seeded with `seed`.
pub fn add_awgn(signal: &PassbandSignal, sigma_n: f64, seed: u64) -> Result<PassbandSignal> {
    add_awgn_with(signal, sigma_n, &mut ChaCha8Rng::seed_from_u64(seed))
}
