//! Experiment orchestration: PAPR distributions and BER curves swept over
//! modulation scheme and clipping ratio, with the same-order PSK-minus-QAM
//! difference columns.
//!
//! Every random draw comes from a ChaCha8 stream keyed by the master seed and
//! a stream id built from (experiment kind, scheme, Eb/N0 index, frame). The
//! scheme index is the scheme's position in [`ModScheme::ALL`], so a scheme's
//! numbers do not depend on which other schemes are in the run. Data and noise
//! streams do not depend on the clipping ratio, so every CR sees the same
//! frames and the same noise. Parallel results are merged in index order.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::channel::{self, NoiseConfig};
use crate::clip::{self, ComposedFilter};
use crate::constellation::{constellation_points, demap_symbols_with, map_bits_with, ConstellationTable, ModScheme};
use crate::error::{Error, Result};
use crate::fir::{self, FirDesignSpec, FirFilter};
use crate::metrics::{self, BerPoint, CcdfCurve, ErrorCount};
use crate::ofdm::{self, Downconverter, BasebandSignal, OfdmModem, OfdmParams, PassbandSignal};

const STREAM_PAPR_DATA: u64 = 1;
const STREAM_BER_DATA: u64 = 2;
const STREAM_BER_NOISE: u64 = 3;

fn stream_id(kind: u64, scheme: usize, ebn0: usize, frame: usize) -> u64 {
    (kind << 56) | ((scheme as u64) << 48) | ((ebn0 as u64) << 32) | frame as u64
}

fn scheme_index(scheme: ModScheme) -> usize {
    ModScheme::ALL.iter().position(|&s| s == scheme).expect("every scheme is listed")
}

/// Threshold axis of the CCDF curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdGrid {
    pub start_db: f64,
    pub step_db: f64,
    pub count: usize,
}

impl ThresholdGrid {
    pub fn thresholds(&self) -> Vec<f64> {
        metrics::threshold_grid(self.start_db, self.step_db, self.count)
    }
}

impl Default for ThresholdGrid {
    fn default() -> Self {
        ThresholdGrid {
            start_db: 0.0,
            step_db: 0.01,
            count: 2001,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub params: OfdmParams,
    pub schemes: Vec<ModScheme>,
    pub cr_values: Vec<f64>,
    /// Exceedance probability at which the PAPR table is read off the CCDF.
    pub ccdf_read_point: f64,
    pub ccdf_grid: ThresholdGrid,
    /// OFDM symbols per PAPR distribution.
    pub n_symbols: usize,
    pub ebn0_grid: Vec<f64>,
    /// Minimum number of bits per BER point; rounded up to whole symbols.
    pub bits_per_point: usize,
    pub seed: u64,
    pub hpf: FirDesignSpec,
    pub lpf_taps: usize,
    /// Charge the cyclic prefix energy to the bits when calibrating Eb/N0.
    pub count_cp_energy: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        let params = OfdmParams::reference();
        ExperimentSpec {
            params,
            schemes: ModScheme::ALL.to_vec(),
            cr_values: vec![0.8, 1.0, 1.2, 1.4, 1.6],
            ccdf_read_point: 1e-3,
            ccdf_grid: ThresholdGrid::default(),
            n_symbols: 10_000,
            ebn0_grid: vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0],
            bits_per_point: 200_000,
            seed: 2014,
            hpf: fir::default_hpf_spec(&params, fir::DEFAULT_HPF_TAPS).expect("valid for the default parameters"),
            lpf_taps: ofdm::DEFAULT_LPF_TAPS,
            count_cp_energy: false,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.schemes.is_empty() {
            return cfg("schemes must not be empty");
        }
        if self.cr_values.is_empty() || self.cr_values.iter().any(|&c| !(c > 0.0) || !c.is_finite()) {
            return cfg("cr_values must be positive");
        }
        if !(self.ccdf_read_point > 0.0 && self.ccdf_read_point < 1.0) {
            return cfg("ccdf_read_point must lie strictly between 0 and 1");
        }
        if self.n_symbols < 1000 {
            return cfg("n_symbols must be at least 1000");
        }
        if self.ebn0_grid.iter().any(|e| !e.is_finite()) {
            return cfg("ebn0_grid values must be finite");
        }
        if self.bits_per_point == 0 {
            return cfg("bits_per_point must be positive");
        }
        if !(self.ccdf_grid.step_db > 0.0) || self.ccdf_grid.count < 2 {
            return cfg("ccdf grid needs a positive step and at least two thresholds");
        }
        self.hpf.validate()?;
        if self.lpf_taps < 3 || self.lpf_taps % 2 == 0 {
            return cfg("lpf_taps must be odd and >= 3");
        }
        Ok(())
    }

    fn cp_overhead(&self) -> f64 {
        if self.count_cp_energy {
            let n = self.params.n_subcarriers() as f64;
            n / (n + self.params.cp_len() as f64)
        } else {
            1.0
        }
    }
}

/// Transmit and receive chain for one parameter set.
#[derive(Clone)]
pub struct Link {
    params: OfdmParams,
    modem: OfdmModem,
    filter: ComposedFilter,
    downconverter: Downconverter,
}

impl Link {
    pub fn new(params: OfdmParams, hpf: &FirFilter, lpf: FirFilter) -> Self {
        Link {
            params,
            modem: OfdmModem::new(params),
            filter: ComposedFilter::new(params, hpf),
            downconverter: Downconverter::with_filter(params, lpf),
        }
    }

    /// Designs both filters from the experiment spec.
    pub fn from_spec(spec: &ExperimentSpec) -> Result<Self> {
        let hpf = fir::design_equiripple(&spec.hpf).map_err(|e| e.context("designing the high-pass filter"))?;
        let lpf = fir::design_image_reject_lpf(&spec.params, spec.lpf_taps)
            .map_err(|e| e.context("designing the image-reject filter"))?;
        Ok(Link::new(spec.params, &hpf, lpf))
    }

    pub fn params(&self) -> &OfdmParams {
        &self.params
    }

    /// Subcarrier symbols -> one oversampled baseband symbol without prefix.
    pub fn baseband_symbol(&self, symbols: &[Complex64]) -> Result<BasebandSignal> {
        self.modem.modulate_symbols(symbols)
    }

    pub fn upconvert(&self, baseband: &BasebandSignal) -> Result<PassbandSignal> {
        ofdm::upconvert(baseband, self.params.carrier_hz(), self.params.bandwidth_hz())
    }

    /// Subcarrier symbols -> one unclipped passband symbol without prefix.
    pub fn passband_symbol(&self, symbols: &[Complex64]) -> Result<PassbandSignal> {
        self.upconvert(&self.baseband_symbol(symbols)?)
    }

    /// Clips at `amplitude` (if any) and applies the composed filter.
    /// Without a clip level the symbol is passed through untouched.
    pub fn clip_and_filter(&self, symbol: &PassbandSignal, amplitude: Option<f64>) -> Result<PassbandSignal> {
        match amplitude {
            Some(a) => self.filter.apply(&clip::clip_passband(symbol, a)?),
            None => Ok(symbol.clone()),
        }
    }

    pub fn add_prefix(&self, symbol: &PassbandSignal) -> Result<PassbandSignal> {
        ofdm::add_cyclic_prefix(symbol, self.params.cp_samples())
    }

    /// Prefix removal, downconversion and demodulation of one received symbol.
    pub fn receive(&self, received: &PassbandSignal) -> Result<Vec<Complex64>> {
        let body = ofdm::remove_cyclic_prefix(received, self.params.cp_samples())?;
        let bb = self.downconverter.process(&body)?;
        self.modem.demodulate(&bb)
    }
}

fn random_bits<R: Rng>(rng: &mut R, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

struct TxFrame {
    bits: Vec<u8>,
    symbols: Vec<Complex64>,
    baseband_papr_db: f64,
    passband: PassbandSignal,
}

fn transmit_batch(
    link: &Link,
    table: &ConstellationTable,
    n_frames: usize,
    seed: u64,
    kind: u64,
) -> Result<Vec<TxFrame>> {
    let si = scheme_index(table.scheme());
    let n_bits = link.params.n_subcarriers() * table.scheme().bits_per_symbol();
    (0..n_frames)
        .into_par_iter()
        .map(|f| {
            let mut rng = channel::stream_rng(seed, stream_id(kind, si, 0, f));
            let bits = random_bits(&mut rng, n_bits);
            let symbols = map_bits_with(table, &bits)?;
            let baseband = link.baseband_symbol(&symbols)?;
            let baseband_papr_db = metrics::papr_db(&baseband)?;
            let passband = link.upconvert(&baseband)?;
            Ok(TxFrame {
                bits,
                symbols,
                baseband_papr_db,
                passband,
            })
        })
        .collect()
}

/// RMS over the whole batch, summed in frame order.
fn batch_rms(frames: &[&PassbandSignal]) -> f64 {
    let (sum, count) = frames.iter().fold((0.0, 0usize), |(s, n), f| {
        (s + f.samples.iter().map(|x| x * x).sum::<f64>(), n + f.samples.len())
    });
    (sum / count as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PaprRow {
    pub scheme: ModScheme,
    pub cr: f64,
    /// Clipped and filtered PAPR read at the CCDF read point.
    pub papr_db: f64,
    pub unclipped_papr_db: f64,
    /// Unclipped PAPR of the complex baseband envelope at the read point.
    pub unclipped_baseband_papr_db: f64,
    /// PSK value minus QAM value for this order and CR, when both ran.
    pub pair_difference_db: Option<f64>,
    /// Share of symbols whose filtered peak exceeds the clip level.
    pub regrowth_fraction: f64,
    pub n_symbols: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PaprCurve {
    pub scheme: ModScheme,
    /// `None` for the unclipped reference distribution.
    pub cr: Option<f64>,
    pub curve: CcdfCurve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PaprReport {
    pub rows: Vec<PaprRow>,
    pub curves: Vec<PaprCurve>,
}

fn papr_values<'a>(signals: impl IntoParallelIterator<Item = &'a PassbandSignal>) -> Result<Vec<f64>> {
    signals.into_par_iter().map(metrics::papr_db).collect()
}

pub fn run_papr_experiment(spec: &ExperimentSpec) -> Result<PaprReport> {
    spec.validate()?;
    let link = Link::from_spec(spec)?;
    let thresholds = spec.ccdf_grid.thresholds();
    let mut rows = Vec::new();
    let mut curves = Vec::new();

    for &scheme in &spec.schemes {
        let ctx = |cr: Option<f64>| match cr {
            Some(cr) => format!("PAPR run for {scheme} at CR {cr}"),
            None => format!("PAPR run for {scheme} without clipping"),
        };
        let table = constellation_points(scheme);
        let frames = transmit_batch(&link, &table, spec.n_symbols, spec.seed, STREAM_PAPR_DATA)
            .map_err(|e| e.context(ctx(None)))?;
        let passband: Vec<&PassbandSignal> = frames.iter().map(|f| &f.passband).collect();
        let sigma = batch_rms(&passband);

        let base = papr_values(passband.par_iter().copied()).map_err(|e| e.context(ctx(None)))?;
        let base_curve = metrics::estimate_ccdf(&base, &thresholds).map_err(|e| e.context(ctx(None)))?;
        let unclipped = metrics::ccdf_quantile(&base_curve, spec.ccdf_read_point).map_err(|e| e.context(ctx(None)))?;
        curves.push(PaprCurve { scheme, cr: None, curve: base_curve });
        let envelope: Vec<f64> = frames.iter().map(|f| f.baseband_papr_db).collect();
        let unclipped_baseband = metrics::estimate_ccdf(&envelope, &thresholds)
            .and_then(|c| metrics::ccdf_quantile(&c, spec.ccdf_read_point))
            .map_err(|e| e.context(ctx(None)))?;

        for &cr in &spec.cr_values {
            let run = || -> Result<(PaprRow, CcdfCurve)> {
                let amplitude = clip::ClipConfig::new(cr, sigma)?.amplitude();
                let out: Vec<(f64, bool)> = passband
                    .par_iter()
                    .map(|x| {
                        let y = link.clip_and_filter(x, Some(amplitude))?;
                        let peak = y.samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
                        Ok((metrics::papr_db(&y)?, peak > amplitude))
                    })
                    .collect::<Result<_>>()?;
                let values: Vec<f64> = out.iter().map(|o| o.0).collect();
                let regrown = out.iter().filter(|o| o.1).count();
                let curve = metrics::estimate_ccdf(&values, &thresholds)?;
                let papr = metrics::ccdf_quantile(&curve, spec.ccdf_read_point)?;
                Ok((
                    PaprRow {
                        scheme,
                        cr,
                        papr_db: papr,
                        unclipped_papr_db: unclipped,
                        unclipped_baseband_papr_db: unclipped_baseband,
                        pair_difference_db: None,
                        regrowth_fraction: regrown as f64 / values.len() as f64,
                        n_symbols: values.len(),
                    },
                    curve,
                ))
            };
            let (row, curve) = run().map_err(|e| e.context(ctx(Some(cr))))?;
            rows.push(row);
            curves.push(PaprCurve { scheme, cr: Some(cr), curve });
        }
    }

    let diffs: Vec<Option<f64>> = rows
        .iter()
        .map(|r| pair_difference(&rows, r.scheme, r.cr, |x| x.scheme, |x| x.cr, |x| x.papr_db))
        .collect();
    for (row, d) in rows.iter_mut().zip(diffs) {
        row.pair_difference_db = d;
    }
    Ok(PaprReport { rows, curves })
}

/// PSK value minus QAM value of the same order at the same operating point.
fn pair_difference<T>(
    rows: &[T],
    scheme: ModScheme,
    cr: f64,
    scheme_of: impl Fn(&T) -> ModScheme,
    cr_of: impl Fn(&T) -> f64,
    value_of: impl Fn(&T) -> f64,
) -> Option<f64> {
    let find = |s: ModScheme| rows.iter().find(|r| scheme_of(r) == s && cr_of(r) == cr).map(&value_of);
    let (psk, qam) = match scheme.family() {
        crate::constellation::Family::Psk => (scheme, scheme.partner()),
        crate::constellation::Family::Qam => (scheme.partner(), scheme),
    };
    Some(find(psk)? - find(qam)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerRow {
    pub scheme: ModScheme,
    pub cr: f64,
    pub ebn0_db: f64,
    pub count: ErrorCount,
    /// PSK BER minus QAM BER for this order, CR and Eb/N0, when both ran.
    pub pair_difference: Option<f64>,
}

impl BerRow {
    pub fn ber(&self) -> f64 {
        self.count.ber()
    }
}

/// BER curve of one scheme at one clipping ratio (`None` = no clipping and
/// no composed filter).
///
/// The receiver divides the demodulated symbols by the in-band gain of the
/// clipped and filtered transmitter, estimated from the noiseless batch, so
/// that clipping shrinkage does not bias the decision regions.
pub fn run_ber_curve(
    spec: &ExperimentSpec,
    link: &Link,
    scheme: ModScheme,
    clip_ratio: Option<f64>,
) -> Result<Vec<BerPoint>> {
    let table = constellation_points(scheme);
    let bits_per_frame = spec.params.n_subcarriers() * scheme.bits_per_symbol();
    let n_frames = spec.bits_per_point.div_ceil(bits_per_frame);
    let frames = transmit_batch(link, &table, n_frames, spec.seed, STREAM_BER_DATA)?;
    let unclipped: Vec<&PassbandSignal> = frames.iter().map(|f| &f.passband).collect();
    let amplitude = match clip_ratio {
        Some(cr) => Some(clip::ClipConfig::new(cr, batch_rms(&unclipped))?.amplitude()),
        None => None,
    };

    let sent: Vec<PassbandSignal> = unclipped
        .par_iter()
        .map(|x| link.clip_and_filter(x, amplitude).and_then(|y| link.add_prefix(&y)))
        .collect::<Result<_>>()?;

    // noiseless pass: in-band gain
    let (num, den) = sent
        .par_iter()
        .zip(&frames)
        .map(|(tx, frame)| {
            let rx = link.receive(tx)?;
            let num: f64 = rx.iter().zip(&frame.symbols).map(|(y, x)| (y * x.conj()).re).sum();
            let den: f64 = frame.symbols.iter().map(|x| x.norm_sqr()).sum();
            Ok((num, den))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let gain = num / den;
    if !(gain > 0.0) {
        return Err(Error::UndefinedMetric(format!("in-band gain {gain} is not positive")));
    }

    let bodies: Vec<&[f64]> = sent.iter().map(|s| &s.samples[spec.params.cp_samples()..]).collect();
    let power = bodies.iter().map(|b| b.iter().map(|x| x * x).sum::<f64>()).sum::<f64>()
        / bodies.iter().map(|b| b.len()).sum::<usize>() as f64;

    let si = scheme_index(scheme);
    spec.ebn0_grid
        .iter()
        .enumerate()
        .map(|(ei, &ebn0_db)| {
            let noise = NoiseConfig {
                ebn0_db,
                bits_per_symbol: scheme.bits_per_symbol(),
                occupied_fraction: 1.0 / spec.params.oversample() as f64,
                cp_overhead: spec.cp_overhead(),
            };
            let sigma_n = channel::noise_sigma(&noise, power)?;
            let counts = sent
                .par_iter()
                .zip(&frames)
                .enumerate()
                .map(|(f, (tx, frame))| {
                    let mut rng = channel::stream_rng(spec.seed, stream_id(STREAM_BER_NOISE, si, ei, f));
                    let rx = channel::add_awgn_with(tx, sigma_n, &mut rng)?;
                    let y: Vec<Complex64> = link.receive(&rx)?.into_iter().map(|z| z / gain).collect();
                    let bits = demap_symbols_with(&table, &y);
                    metrics::count_bit_errors(&frame.bits, &bits)
                })
                .collect::<Result<Vec<_>>>()?;
            let count = counts.into_iter().fold(ErrorCount::default(), ErrorCount::merge);
            Ok(BerPoint { ebn0_db, count })
        })
        .collect()
}

pub fn run_ber_experiment(spec: &ExperimentSpec) -> Result<Vec<BerRow>> {
    spec.validate()?;
    let link = Link::from_spec(spec)?;
    let mut rows = Vec::new();
    for &scheme in &spec.schemes {
        for &cr in &spec.cr_values {
            let points = run_ber_curve(spec, &link, scheme, Some(cr))
                .map_err(|e| e.context(format!("BER run for {scheme} at CR {cr}")))?;
            rows.extend(points.into_iter().map(|p| BerRow {
                scheme,
                cr,
                ebn0_db: p.ebn0_db,
                count: p.count,
                pair_difference: None,
            }));
        }
    }
    let diffs: Vec<Option<f64>> = rows
        .iter()
        .map(|r| {
            let same_ebn0: Vec<&BerRow> = rows.iter().filter(|x| x.ebn0_db == r.ebn0_db).collect();
            pair_difference(&same_ebn0, r.scheme, r.cr, |x| x.scheme, |x| x.cr, |x| x.ber())
        })
        .collect();
    for (row, d) in rows.iter_mut().zip(diffs) {
        row.pair_difference = d;
    }
    Ok(rows)
}

/// One CSV record type: a fixed header and matching field strings.
pub trait CsvRecord {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

fn num(v: f64) -> String {
    // shortest representation that parses back to the same f64
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

impl CsvRecord for PaprRow {
    fn header() -> &'static [&'static str] {
        &[
            "scheme",
            "cr",
            "papr_db",
            "unclipped_papr_db",
            "unclipped_baseband_papr_db",
            "pair_difference_db",
            "regrowth_fraction",
            "n_symbols",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.scheme.to_string(),
            num(self.cr),
            num(self.papr_db),
            num(self.unclipped_papr_db),
            num(self.unclipped_baseband_papr_db),
            opt(self.pair_difference_db),
            num(self.regrowth_fraction),
            self.n_symbols.to_string(),
        ]
    }
}

impl CsvRecord for BerRow {
    fn header() -> &'static [&'static str] {
        &["scheme", "cr", "ebn0_db", "ber", "bit_errors", "bits_total", "pair_difference"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.scheme.to_string(),
            num(self.cr),
            num(self.ebn0_db),
            num(self.ber()),
            self.count.errors.to_string(),
            self.count.total.to_string(),
            opt(self.pair_difference),
        ]
    }
}

/// One point of a CCDF curve file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcdfPoint {
    pub threshold_db: f64,
    pub value: f64,
    pub sample_count: usize,
}

impl CsvRecord for CcdfPoint {
    fn header() -> &'static [&'static str] {
        &["threshold_db", "value", "sample_count"]
    }

    fn fields(&self) -> Vec<String> {
        vec![num(self.threshold_db), num(self.value), self.sample_count.to_string()]
    }
}

pub fn ccdf_points(curve: &CcdfCurve) -> Vec<CcdfPoint> {
    curve
        .thresholds_db
        .iter()
        .zip(&curve.prob_exceed)
        .map(|(&threshold_db, &value)| CcdfPoint {
            threshold_db,
            value,
            sample_count: curve.sample_count,
        })
        .collect()
}

/// One point of a BER curve file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerCurvePoint {
    pub ebn0_db: f64,
    pub value: f64,
    pub sample_count: u64,
}

impl CsvRecord for BerCurvePoint {
    fn header() -> &'static [&'static str] {
        &["ebn0_db", "value", "sample_count"]
    }

    fn fields(&self) -> Vec<String> {
        vec![num(self.ebn0_db), num(self.value), self.sample_count.to_string()]
    }
}

pub fn csv_string<R: CsvRecord>(rows: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::Shape(format!("CSV encoding failed: {e}"));
    w.write_record(R::header()).map_err(to_err)?;
    for r in rows {
        w.write_record(r.fields()).map_err(to_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Shape(format!("CSV encoding failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV fields are UTF-8"))
}

pub fn emit_csv<R: CsvRecord>(rows: &[R], path: &Path) -> Result<()> {
    let text = csv_string(rows)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn cr_tag(cr: f64) -> String {
    format!("cr{cr:.2}")
}

/// Writes `papr_table.csv` plus one CCDF file per curve under `ccdf/`.
/// Returns the paths written, in order.
pub fn write_papr_outputs(report: &PaprReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let table = dir.join("papr_table.csv");
    emit_csv(&report.rows, &table)?;
    written.push(table);
    for c in &report.curves {
        let tag = c.cr.map(cr_tag).unwrap_or_else(|| "unclipped".into());
        let path = dir.join("ccdf").join(format!("{}_{tag}.csv", c.scheme));
        emit_csv(&ccdf_points(&c.curve), &path)?;
        written.push(path);
    }
    Ok(written)
}

/// Writes `ber_table.csv` plus one curve file per (scheme, CR) under `ber/`.
pub fn write_ber_outputs(rows: &[BerRow], dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let table = dir.join("ber_table.csv");
    emit_csv(rows, &table)?;
    written.push(table);
    let mut keys: Vec<(ModScheme, f64)> = Vec::new();
    for r in rows {
        if !keys.iter().any(|&(s, c)| s == r.scheme && c == r.cr) {
            keys.push((r.scheme, r.cr));
        }
    }
    for (scheme, cr) in keys {
        let points: Vec<BerCurvePoint> = rows
            .iter()
            .filter(|r| r.scheme == scheme && r.cr == cr)
            .map(|r| BerCurvePoint {
                ebn0_db: r.ebn0_db,
                value: r.ber(),
                sample_count: r.count.total,
            })
            .collect();
        let path = dir.join("ber").join(format!("{scheme}_{}.csv", cr_tag(cr)));
        emit_csv(&points, &path)?;
        written.push(path);
    }
    Ok(written)
}
