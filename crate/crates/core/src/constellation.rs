//! Bit-to-symbol mapping for the PSK and QAM schemes used by the simulator.
//!
//! Every table is normalized to unit average symbol energy. The index of a
//! point in a [`ConstellationTable`] is its label read as an unsigned
//! integer, most significant bit first.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Psk,
    Qam,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModScheme {
    family: Family,
    order: u32,
}

impl ModScheme {
    pub const QPSK: ModScheme = ModScheme { family: Family::Psk, order: 4 };
    pub const QAM4: ModScheme = ModScheme { family: Family::Qam, order: 4 };
    pub const PSK8: ModScheme = ModScheme { family: Family::Psk, order: 8 };
    pub const QAM8: ModScheme = ModScheme { family: Family::Qam, order: 8 };
    pub const PSK16: ModScheme = ModScheme { family: Family::Psk, order: 16 };
    pub const QAM16: ModScheme = ModScheme { family: Family::Qam, order: 16 };
    pub const PSK32: ModScheme = ModScheme { family: Family::Psk, order: 32 };
    pub const QAM32: ModScheme = ModScheme { family: Family::Qam, order: 32 };

    /// All supported schemes, in the column order of the comparison tables.
    pub const ALL: [ModScheme; 8] = [
        Self::QPSK,
        Self::QAM4,
        Self::PSK8,
        Self::QAM8,
        Self::PSK16,
        Self::QAM16,
        Self::PSK32,
        Self::QAM32,
    ];

    pub fn new(family: Family, order: u32) -> Result<Self> {
        if !matches!(order, 4 | 8 | 16 | 32) {
            return Err(Error::Config(format!(
                "unsupported modulation order {order}; expected 4, 8, 16 or 32"
            )));
        }
        Ok(ModScheme { family, order })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.order.trailing_zeros() as usize
    }

    /// Config-file name of the scheme ("qpsk", "qam", "8psk", ...).
    pub fn name(&self) -> &'static str {
        match (self.family, self.order) {
            (Family::Psk, 4) => "qpsk",
            (Family::Qam, 4) => "qam",
            (Family::Psk, 8) => "8psk",
            (Family::Qam, 8) => "8qam",
            (Family::Psk, 16) => "16psk",
            (Family::Qam, 16) => "16qam",
            (Family::Psk, 32) => "32psk",
            (Family::Qam, 32) => "32qam",
            _ => unreachable!("order validated at construction"),
        }
    }

    /// The scheme of the same order from the other family.
    pub fn partner(&self) -> ModScheme {
        let family = match self.family {
            Family::Psk => Family::Qam,
            Family::Qam => Family::Psk,
        };
        ModScheme { family, order: self.order }
    }
}

impl fmt::Display for ModScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for ModScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModScheme::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown modulation scheme {s:?}; expected one of qpsk, qam, 8psk, 8qam, 16psk, 16qam, 32psk, 32qam"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstellationTable {
    scheme: ModScheme,
    points: Vec<Complex64>,
}

impl ConstellationTable {
    pub fn scheme(&self) -> ModScheme {
        self.scheme
    }

    /// Points indexed by label.
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Label of entry `index` as bits, most significant first.
    pub fn label(&self, index: usize) -> Vec<u8> {
        let k = self.scheme.bits_per_symbol();
        (0..k).map(|b| ((index >> (k - 1 - b)) & 1) as u8).collect()
    }

    /// Index of the Euclidean-nearest point; ties go to the lowest index.
    pub fn nearest(&self, z: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    pub fn min_distance(&self) -> f64 {
        let mut d = f64::INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                d = d.min((a - b).norm());
            }
        }
        d
    }
}

fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

/// Amplitude level of Gray code `code` on an axis with `levels` equally
/// spaced odd-integer positions (-levels+1, ..., levels-1).
fn gray_axis(levels: usize) -> Vec<f64> {
    let mut out = vec![0.0; levels];
    for pos in 0..levels {
        out[gray(pos)] = (2 * pos) as f64 - (levels as f64 - 1.0);
    }
    out
}

fn psk_points(order: usize) -> Vec<Complex64> {
    let mut pts = vec![Complex64::new(0.0, 0.0); order];
    let offset = PI / order as f64;
    for pos in 0..order {
        pts[gray(pos)] = Complex64::from_polar(1.0, offset + 2.0 * PI * pos as f64 / order as f64);
    }
    pts
}

/// Rectangular grid with per-axis Gray labels: the high `i_bits` of the label
/// select the in-phase level, the low `q_bits` the quadrature level.
fn rect_points(i_bits: usize, q_bits: usize) -> Vec<Complex64> {
    let i_levels = gray_axis(1 << i_bits);
    let q_levels = gray_axis(1 << q_bits);
    (0..1usize << (i_bits + q_bits))
        .map(|label| Complex64::new(i_levels[label >> q_bits], q_levels[label & ((1 << q_bits) - 1)]))
        .collect()
}

/// 32-point cross: an 8x4 Gray rectangle whose outer columns (I = +-7) are
/// folded onto the rows Q = +-5, giving the 6x6 grid without its corners.
fn cross32_points() -> Vec<Complex64> {
    rect_points(3, 2)
        .into_iter()
        .map(|p| {
            if p.re.abs() > 6.0 {
                Complex64::new(p.re.signum() * p.im.abs(), p.im.signum() * 5.0)
            } else {
                p
            }
        })
        .collect()
}

fn normalize(mut pts: Vec<Complex64>) -> Vec<Complex64> {
    let energy = pts.iter().map(|p| p.norm_sqr()).sum::<f64>() / pts.len() as f64;
    let scale = energy.sqrt().recip();
    pts.iter_mut().for_each(|p| *p *= scale);
    pts
}

pub fn constellation_points(scheme: ModScheme) -> ConstellationTable {
    let points = match (scheme.family, scheme.order) {
        (Family::Psk, m) => psk_points(m as usize),
        (Family::Qam, 4) => rect_points(1, 1),
        (Family::Qam, 8) => rect_points(2, 1),
        (Family::Qam, 16) => rect_points(2, 2),
        (Family::Qam, 32) => cross32_points(),
        _ => unreachable!("order validated at construction"),
    };
    ConstellationTable { scheme, points: normalize(points) }
}

/// Maps a bit sequence (one bit per byte, 0 or 1) onto constellation points.
pub fn map_bits(bits: &[u8], scheme: ModScheme) -> Result<Vec<Complex64>> {
    map_bits_with(&constellation_points(scheme), bits)
}

pub fn map_bits_with(table: &ConstellationTable, bits: &[u8]) -> Result<Vec<Complex64>> {
    let k = table.scheme.bits_per_symbol();
    if bits.len() % k != 0 {
        return Err(Error::Shape(format!(
            "{} bits is not a multiple of {k} bits per {} symbol",
            bits.len(),
            table.scheme
        )));
    }
    Ok(bits
        .chunks_exact(k)
        .map(|group| {
            let label = group.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
            table.points[label]
        })
        .collect())
}

/// Hard-decision minimum-distance demapping.
pub fn demap_symbols(symbols: &[Complex64], scheme: ModScheme) -> Vec<u8> {
    demap_symbols_with(&constellation_points(scheme), symbols)
}

pub fn demap_symbols_with(table: &ConstellationTable, symbols: &[Complex64]) -> Vec<u8> {
    let k = table.scheme.bits_per_symbol();
    let mut bits = Vec::with_capacity(symbols.len() * k);
    for &z in symbols {
        let idx = table.nearest(z);
        bits.extend((0..k).map(|b| ((idx >> (k - 1 - b)) & 1) as u8));
    }
    bits
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn qpsk_is_gray_labeled_on_the_diagonals() {
        let t = constellation_points(ModScheme::QPSK);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // angle order 45, 135, 225, 315 degrees -> labels 00, 01, 11, 10
        assert!(close(t.points()[0b00], Complex64::new(s, s)));
        assert!(close(t.points()[0b01], Complex64::new(-s, s)));
        assert!(close(t.points()[0b11], Complex64::new(-s, -s)));
        assert!(close(t.points()[0b10], Complex64::new(s, -s)));
    }

    #[test]
    fn qam16_grid_is_scaled_by_inverse_sqrt10() {
        let t = constellation_points(ModScheme::QAM16);
        let scale = 10f64.sqrt();
        let mut coords: Vec<(i64, i64)> = t
            .points()
            .iter()
            .map(|p| ((p.re * scale).round() as i64, (p.im * scale).round() as i64))
            .collect();
        for p in t.points() {
            assert!(((p.re * scale).round() - p.re * scale).abs() < 1e-12);
        }
        coords.sort();
        let mut expected = Vec::new();
        for i in [-3, -1, 1, 3] {
            for q in [-3, -1, 1, 3] {
                expected.push((i, q));
            }
        }
        assert_eq!(coords, expected);
    }

    #[test]
    fn cross32_covers_the_cornerless_six_by_six_grid() {
        let t = constellation_points(ModScheme::QAM32);
        // mean energy of the unscaled cross is 640 / 32 = 20
        let scale = 20f64.sqrt();
        let mut coords: Vec<(i64, i64)> = t
            .points()
            .iter()
            .map(|p| ((p.re * scale).round() as i64, (p.im * scale).round() as i64))
            .collect();
        coords.sort();
        let mut expected = Vec::new();
        for i in [-5i64, -3, -1, 1, 3, 5] {
            for q in [-5i64, -3, -1, 1, 3, 5] {
                if !(i.abs() == 5 && q.abs() == 5) {
                    expected.push((i, q));
                }
            }
        }
        assert_eq!(coords, expected);
    }

    #[test]
    fn tables_have_unit_energy_and_distinct_points() {
        for scheme in ModScheme::ALL {
            let t = constellation_points(scheme);
            assert_eq!(t.points().len(), scheme.order() as usize);
            let e = t.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / t.points().len() as f64;
            assert!((e - 1.0).abs() < 1e-12, "{scheme}: energy {e}");
            assert!(t.min_distance() > 1e-3, "{scheme}: duplicate points");
            if scheme.family() == Family::Psk {
                assert!(t.points().iter().all(|p| (p.norm() - 1.0).abs() < 1e-12));
            }
        }
    }

    #[test]
    fn psk_neighbours_differ_in_one_bit() {
        for scheme in [ModScheme::QPSK, ModScheme::PSK8, ModScheme::PSK16, ModScheme::PSK32] {
            let t = constellation_points(scheme);
            let m = t.points().len();
            let mut by_angle: Vec<usize> = (0..m).collect();
            by_angle.sort_by(|&a, &b| {
                let pa = t.points()[a].arg().rem_euclid(2.0 * PI);
                let pb = t.points()[b].arg().rem_euclid(2.0 * PI);
                pa.total_cmp(&pb)
            });
            for w in 0..m {
                let a = by_angle[w];
                let b = by_angle[(w + 1) % m];
                assert_eq!((a ^ b).count_ones(), 1, "{scheme}: labels {a:b} and {b:b}");
            }
        }
    }

    #[test]
    fn square_qam_neighbours_differ_in_one_bit() {
        for scheme in [ModScheme::QAM4, ModScheme::QAM8, ModScheme::QAM16] {
            let t = constellation_points(scheme);
            let d = t.min_distance();
            for (a, pa) in t.points().iter().enumerate() {
                for (b, pb) in t.points().iter().enumerate() {
                    if a != b && ((pa - pb).norm() - d).abs() < 1e-9 {
                        assert_eq!((a ^ b).count_ones(), 1, "{scheme}");
                    }
                }
            }
        }
    }

    #[test]
    fn mapping_edge_cases() {
        assert!(map_bits(&[], ModScheme::QAM16).unwrap().is_empty());
        let s = map_bits(&[0, 0], ModScheme::QPSK).unwrap();
        assert!(close(s[0], constellation_points(ModScheme::QPSK).points()[0]));
        let err = map_bits(&[0, 1, 1], ModScheme::QPSK).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn unsupported_order_is_a_config_error() {
        assert!(matches!(ModScheme::new(Family::Qam, 64), Err(Error::Config(_))));
        assert!(ModScheme::new(Family::Psk, 8).is_ok());
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in ModScheme::ALL {
            assert_eq!(s.name().parse::<ModScheme>().unwrap(), s);
        }
        assert!("64qam".parse::<ModScheme>().is_err());
        assert_eq!(ModScheme::PSK16.partner(), ModScheme::QAM16);
    }

    #[test]
    fn small_perturbations_demap_to_the_same_label() {
        for scheme in ModScheme::ALL {
            let t = constellation_points(scheme);
            let r = 0.49 * t.min_distance();
            for (i, p) in t.points().iter().enumerate() {
                for k in 0..8 {
                    let z = p + Complex64::from_polar(r, k as f64 * PI / 4.0 + 0.1);
                    assert_eq!(t.nearest(z), i);
                }
            }
        }
    }

    #[test]
    fn ties_go_to_the_lowest_index() {
        let t = constellation_points(ModScheme::QPSK);
        // origin is equidistant from all four points
        assert_eq!(t.nearest(Complex64::new(0.0, 0.0)), 0);
    }
}
