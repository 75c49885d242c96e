mod common;

use std::f64::consts::PI;

use clipofdm::channel::{add_awgn_with, noise_sigma, stream_rng, NoiseConfig};
use clipofdm::clip::{self, ComposedFilter};
use clipofdm::constellation::{constellation_points, map_bits_with};
use clipofdm::fir::{self, Band, FirDesignSpec};
use clipofdm::harness::{self, ExperimentSpec, Link};
use clipofdm::metrics::{count_bit_errors, estimate_ccdf};
use clipofdm::ofdm::{self, oversample_extend, Downconverter, OfdmModem, Signal};
use clipofdm::{FreqFrame, ModScheme, OfdmParams, PassbandSignal};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::erf::erfc;

fn random_symbols(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

fn qpsk_passband(link: &Link, rng: &mut impl Rng) -> PassbandSignal {
    let table = constellation_points(ModScheme::QPSK);
    let bits: Vec<u8> = (0..2 * link.params().n_subcarriers()).map(|_| rng.random_range(0..2u8)).collect();
    link.passband_symbol(&map_bits_with(&table, &bits).unwrap()).unwrap()
}

#[test]
fn modulate_matches_direct_sum() {
    let mut rng = stream_rng(1, 0);
    for p in [OfdmParams::new(16, 4, 1e6, 1e6, 4).unwrap(), OfdmParams::reference()] {
        let frame = oversample_extend(&FreqFrame::new(random_symbols(&mut rng, p.n_subcarriers())), p.oversample()).unwrap();
        let fast = OfdmModem::new(p).modulate(&frame).unwrap();
        let slow = common::direct_idft(frame.bins());
        let peak = slow.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (a, b) in fast.samples.iter().zip(&slow) {
            assert!((a - b).norm() <= 1e-9 * peak);
        }
    }
}

#[test]
fn lowpass_ripple_matches_chebyshev_oracle() {
    let spec = FirDesignSpec::new(31, vec![Band::new(0.0, 0.20, 1.0, 1.0), Band::new(0.26, 0.5, 0.0, 1.0)]);
    let filter = fir::design_equiripple(&spec).unwrap();
    let oracle = common::lawson_minimax(&spec, 2048, 300);
    assert!((filter.ripple() - oracle).abs() / oracle < 0.01, "{} vs {oracle}", filter.ripple());
}

#[test]
fn designs_alternate_on_a_dense_grid() {
    let p = OfdmParams::reference();
    for spec in [
        fir::default_hpf_spec(&p, fir::DEFAULT_HPF_TAPS).unwrap(),
        fir::image_reject_lpf_spec(&p, ofdm::DEFAULT_LPF_TAPS).unwrap(),
    ] {
        let filter = fir::design_equiripple(&spec).unwrap();
        let delta = filter.ripple();
        // count sign changes among samples that reach the ripple level
        let mut last = 0.0;
        let mut count = 0;
        for (f, d, w) in common::band_grid(&spec, 8192) {
            let e = w * (filter.amplitude_response(f) - d);
            if e.abs() >= 0.99 * delta && e.signum() != last {
                count += 1;
                last = e.signum();
            }
        }
        assert!(count >= (spec.num_taps + 1) / 2 + 1, "{count} alternations for {} taps", spec.num_taps);
    }
}

#[test]
fn designs_have_linear_phase() {
    let p = OfdmParams::reference();
    let filter = fir::design_default_hpf(&p, fir::DEFAULT_HPF_TAPS).unwrap();
    let grid: Vec<f64> = (0..4096).map(|i| 0.5 * i as f64 / 4095.0).collect();
    let centre = (filter.taps().len() - 1) as f64 / 2.0;
    for (&f, h) in grid.iter().zip(filter.frequency_response(&grid)) {
        if h.norm() <= 1e-8 {
            continue;
        }
        let rotated = h * Complex64::from_polar(1.0, 2.0 * PI * f * centre);
        let phase = rotated.arg().abs();
        assert!(phase < 1e-6 || (PI - phase) < 1e-6, "phase {phase} at {f}");
    }
}

#[test]
fn hpf_attenuates_its_stopband_by_forty_db() {
    let p = OfdmParams::reference();
    let filter = fir::design_default_hpf(&p, fir::DEFAULT_HPF_TAPS).unwrap();
    let stop = filter.spec().bands[0];
    let grid: Vec<f64> = (0..4096).map(|i| stop.lo + (stop.hi - stop.lo) * i as f64 / 4095.0).collect();
    let worst = filter.frequency_response(&grid).iter().map(|h| h.norm()).fold(0.0, f64::max);
    assert!(-20.0 * worst.log10() >= 40.0);
}

#[test]
fn passband_power_matches_baseband_power() {
    let p = OfdmParams::reference();
    let link = Link::from_spec(&ExperimentSpec::default()).unwrap();
    let mut rng = stream_rng(2, 0);
    let mut pass_sum = 0.0;
    let mut base_sum = 0.0;
    for _ in 0..1000 {
        // unit-power subcarrier symbols give unit-power oversampled baseband after scaling by L
        let x: Vec<Complex64> = (0..p.n_subcarriers())
            .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)))
            .collect();
        let bb = link.baseband_symbol(&x).unwrap();
        let scaled = clipofdm::BasebandSignal {
            samples: bb.samples.iter().map(|v| v * (p.oversample() as f64).sqrt()).collect(),
            sample_hz: bb.sample_hz,
        };
        base_sum += scaled.mean_power();
        pass_sum += link.upconvert(&scaled).unwrap().mean_power();
    }
    assert!((base_sum / 1000.0 - 1.0).abs() < 1e-9);
    assert!(((pass_sum / 1000.0).sqrt() - 1.0).abs() < 0.02);
}

#[test]
fn clip_fraction_follows_the_gaussian_tail() {
    let link = Link::from_spec(&ExperimentSpec::default()).unwrap();
    let mut rng = stream_rng(3, 0);
    let frames: Vec<PassbandSignal> = (0..300).map(|_| qpsk_passband(&link, &mut rng)).collect();
    let samples: usize = frames.iter().map(|f| f.len()).sum();
    let sigma = (frames.iter().map(|f| f.samples.iter().map(|x| x * x).sum::<f64>()).sum::<f64>() / samples as f64).sqrt();
    let a = clip::ClipConfig::new(1.0, sigma).unwrap().amplitude();
    let clipped: usize = frames.iter().map(|f| f.samples.iter().filter(|x| x.abs() > a).count()).sum();
    let fraction = clipped as f64 / samples as f64;
    let expected = erfc(1.0 / 2f64.sqrt()); // 2 Q(1)
    assert!((fraction - expected).abs() < 0.02, "{fraction} vs {expected}");
}

#[test]
fn noiseless_receiver_error_vector_is_small() {
    let p = OfdmParams::reference();
    let link = Link::from_spec(&ExperimentSpec::default()).unwrap();
    let mut rng = stream_rng(4, 0);
    let table = constellation_points(ModScheme::QAM16);
    let (mut err, mut ref_power) = (0.0, 0.0);
    for _ in 0..50 {
        let bits: Vec<u8> = (0..4 * p.n_subcarriers()).map(|_| rng.random_range(0..2u8)).collect();
        let x = map_bits_with(&table, &bits).unwrap();
        let rx = link.receive(&link.add_prefix(&link.passband_symbol(&x).unwrap()).unwrap()).unwrap();
        err += x.iter().zip(&rx).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
        ref_power += x.iter().map(|a| a.norm_sqr()).sum::<f64>();
    }
    let evm = (err / ref_power).sqrt();
    assert!(evm < 0.01, "EVM {evm}");
}

#[test]
fn downconverter_rejects_the_double_frequency_image() {
    let p = OfdmParams::reference();
    let dc = Downconverter::new(p).unwrap();
    let nl = p.fft_len();
    let tone = (p.carrier_bin() + 5) as f64;
    let x = PassbandSignal {
        samples: (0..nl).map(|m| 2f64.sqrt() * (2.0 * PI * tone * m as f64 / nl as f64).cos()).collect(),
        sample_hz: p.sample_hz(),
    };
    let y = dc.process(&x).unwrap();
    // a single complex exponential at +5 bins with unit magnitude
    for (m, v) in y.samples.iter().enumerate() {
        let expect = Complex64::from_polar(1.0, 2.0 * PI * 5.0 * m as f64 / nl as f64);
        assert!((v - expect).norm() < 1e-3);
    }
}

#[test]
fn added_noise_has_the_requested_variance() {
    let x = PassbandSignal { samples: vec![0.0; 400_000], sample_hz: 8e6 };
    let cfg = NoiseConfig {
        ebn0_db: 3.0,
        bits_per_symbol: 2,
        occupied_fraction: 0.125,
        cp_overhead: 1.0,
    };
    let sigma = noise_sigma(&cfg, 0.125).unwrap();
    let y = add_awgn_with(&x, sigma, &mut stream_rng(5, 0)).unwrap();
    let mean = y.samples.iter().sum::<f64>() / y.len() as f64;
    let var = y.samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / y.len() as f64;
    assert!((var / (sigma * sigma) - 1.0).abs() < 0.01);
    assert!(mean.abs() < 5.0 * sigma / (y.len() as f64).sqrt());
}

#[test]
fn qpsk_ber_at_four_db_matches_theory() {
    let spec = ExperimentSpec {
        ebn0_grid: vec![4.0],
        bits_per_point: 200_000,
        ..ExperimentSpec::default()
    };
    let link = Link::from_spec(&spec).unwrap();
    let point = harness::run_ber_curve(&spec, &link, ModScheme::QPSK, None).unwrap()[0];
    let theory = 0.5 * erfc(10f64.powf(0.4).sqrt());
    assert!((point.ber() - theory).abs() / theory < 0.15, "{} vs {theory}", point.ber());
}

#[test]
fn independent_random_bits_disagree_half_the_time() {
    let mut rng = stream_rng(6, 0);
    let a: Vec<u8> = (0..100_000).map(|_| rng.random_range(0..2u8)).collect();
    let b: Vec<u8> = (0..100_000).map(|_| rng.random_range(0..2u8)).collect();
    assert!((count_bit_errors(&a, &b).unwrap().ber() - 0.5).abs() < 0.01);
}

#[test]
fn ccdf_matches_sorted_counting() {
    let mut rng = stream_rng(7, 0);
    let values: Vec<f64> = (0..10_000)
        .map(|_| {
            let g: f64 = StandardNormal.sample(&mut rng);
            8.0 + g
        })
        .collect();
    let thresholds: Vec<f64> = (0..200).map(|i| 3.0 + 0.05 * i as f64).collect();
    let curve = estimate_ccdf(&values, &thresholds).unwrap();
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    for (t, p) in thresholds.iter().zip(&curve.prob_exceed) {
        let first_above = sorted.iter().position(|v| v > t).unwrap_or(sorted.len());
        assert_eq!(*p, (sorted.len() - first_above) as f64 / sorted.len() as f64);
    }
}

#[test]
fn clipping_lowers_the_papr_distribution() {
    let spec = ExperimentSpec {
        schemes: vec![ModScheme::QPSK, ModScheme::QAM16],
        n_symbols: 10_000,
        ..ExperimentSpec::default()
    };
    let report = harness::run_papr_experiment(&spec).unwrap();
    for row in &report.rows {
        assert!(row.papr_db < row.unclipped_papr_db, "{row:?}");
    }
}

#[test]
fn heavy_clipping_leaves_an_error_floor() {
    let spec = ExperimentSpec {
        ebn0_grid: vec![12.0, 30.0],
        bits_per_point: 100_000,
        ..ExperimentSpec::default()
    };
    let link = Link::from_spec(&spec).unwrap();
    for scheme in [ModScheme::QPSK, ModScheme::QAM16] {
        let points = harness::run_ber_curve(&spec, &link, scheme, Some(0.8)).unwrap();
        assert!(points.iter().all(|p| p.ber() > 0.0), "{scheme}: {points:?}");
    }
}

#[test]
fn composed_filter_keeps_only_the_occupied_band() {
    let p = OfdmParams::reference();
    let hpf = fir::design_default_hpf(&p, fir::DEFAULT_HPF_TAPS).unwrap();
    let filter = ComposedFilter::new(p, &hpf);
    let link = Link::from_spec(&ExperimentSpec::default()).unwrap();
    let x = qpsk_passband(&link, &mut stream_rng(8, 0));
    let y = filter.apply(&clip::clip_passband(&x, 0.5 * clip::rms(&x).unwrap()).unwrap()).unwrap();
    let spectrum = OfdmModem::new(p)
        .spectrum(&clipofdm::BasebandSignal {
            samples: y.samples.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            sample_hz: y.sample_hz,
        })
        .unwrap();
    let bins = filter.in_band_bins();
    let total: f64 = spectrum.iter().map(|v| v.norm_sqr()).sum();
    let outside: f64 = spectrum
        .iter()
        .enumerate()
        .filter(|(k, _)| !bins.contains(k))
        .map(|(_, v)| v.norm_sqr())
        .sum();
    assert!(outside <= 1e-20 * total);
}
