//! Simulator for OFDM peak-to-average power ratio reduction by passband
//! clipping followed by a frequency-domain composed filter.
//!
//! The transmit chain is
//!
//! ```text
//! bits -> constellation -> zero-insertion oversampling -> IFFT -> upconvert
//!      -> clip -> composed filter (FFT, in-band HPF, out-of-band zeroing, IFFT)
//!      -> cyclic prefix -> AWGN
//! ```
//!
//! and the receiver reverses it with a quadrature downconverter and a
//! minimum-distance demapper. [`harness`] sweeps the chain over modulation
//! schemes and clipping ratios to produce PAPR distributions and BER tables.

pub mod channel;
pub mod clip;
pub mod constellation;
pub mod error;
pub mod fir;
pub mod harness;
pub mod metrics;
pub mod ofdm;

pub use constellation::{constellation_points, demap_symbols, map_bits, ConstellationTable, Family, ModScheme};
pub use error::{Error, Result};
pub use fir::{design_equiripple, Band, FirDesignSpec, FirFilter};
pub use ofdm::{BasebandSignal, FreqFrame, OfdmParams, PassbandSignal, Signal};
