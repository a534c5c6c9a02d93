//! Gray-coded square QAM.
//!
//! The first `log2(S)/2` bits of each symbol select the in-phase level, the rest the quadrature
//! level. Within an axis the bits are a Gray code of the level index, levels run from
//! `-(L-1)` to `L-1` in steps of 2, and the whole grid is scaled to unit average energy.

use num_complex::Complex64;
use rand::Rng;

use crate::dimensioning::ModulationScheme;
use crate::error::{Error, Result};

/// Modulated payload. Frames produced by [`qam_modulate`] hold only constellation points;
/// received frames may hold anything.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFrame {
    pub symbols: Vec<Complex64>,
    pub scheme: ModulationScheme,
    pub symbol_rate_gbaud: f64,
}

impl SymbolFrame {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Scale that gives the grid unit average energy.
pub fn normalization(scheme: &ModulationScheme) -> f64 {
    let s = f64::from(scheme.constellation_points());
    (3.0 / (2.0 * (s - 1.0))).sqrt()
}

/// Every point of the constellation, in symbol-index order.
pub fn constellation(scheme: &ModulationScheme) -> Vec<Complex64> {
    let k = scheme.bits_per_symbol() as usize;
    (0..scheme.constellation_points())
        .map(|idx| {
            let bits: Vec<bool> = (0..k).rev().map(|b| (idx >> b) & 1 == 1).collect();
            map_symbol(&bits, scheme)
        })
        .collect()
}

fn gray_to_binary(mut g: u32) -> u32 {
    let mut b = g;
    while g > 0 {
        g >>= 1;
        b ^= g;
    }
    b
}

fn axis_level(bits: &[bool], levels: u32) -> f64 {
    let gray = bits.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b));
    let index = gray_to_binary(gray);
    f64::from(2 * index) - f64::from(levels - 1)
}

fn map_symbol(bits: &[bool], scheme: &ModulationScheme) -> Complex64 {
    let half = bits.len() / 2;
    let levels = scheme.levels_per_axis();
    Complex64::new(axis_level(&bits[..half], levels), axis_level(&bits[half..], levels))
        * normalization(scheme)
}

pub fn qam_modulate(bits: &[bool], scheme: ModulationScheme, symbol_rate_gbaud: f64) -> Result<SymbolFrame> {
    let k = scheme.bits_per_symbol() as usize;
    if !bits.len().is_multiple_of(k) {
        return Err(Error::invalid(
            "bit stream",
            format!("{} bits is not a multiple of {k} bits per symbol", bits.len()),
        ));
    }
    if !(symbol_rate_gbaud > 0.0) {
        return Err(Error::invalid("symbol rate", format!("{symbol_rate_gbaud}")));
    }
    Ok(SymbolFrame {
        symbols: bits.chunks_exact(k).map(|c| map_symbol(c, &scheme)).collect(),
        scheme,
        symbol_rate_gbaud,
    })
}

fn decide_axis(v: f64, levels: u32, out: &mut Vec<bool>) {
    let max = f64::from(levels - 1);
    let index = ((v + max) / 2.0).round().clamp(0.0, max) as u32;
    let gray = index ^ (index >> 1);
    let nbits = levels.trailing_zeros();
    for b in (0..nbits).rev() {
        out.push((gray >> b) & 1 == 1);
    }
}

/// Minimum-distance decision and Gray demapping.
pub fn qam_demodulate(frame: &SymbolFrame) -> Vec<bool> {
    let scheme = frame.scheme;
    let levels = scheme.levels_per_axis();
    let inv = 1.0 / normalization(&scheme);
    let mut bits = Vec::with_capacity(frame.len() * scheme.bits_per_symbol() as usize);
    for s in &frame.symbols {
        decide_axis(s.re * inv, levels, &mut bits);
        decide_axis(s.im * inv, levels, &mut bits);
    }
    bits
}

/// Uniform random payload.
pub fn random_bits<R: Rng>(rng: &mut R, count: usize) -> Vec<bool> {
    (0..count).map(|_| rng.random()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn scheme(s: u32) -> ModulationScheme {
        ModulationScheme::new(s).unwrap()
    }

    #[test]
    fn qpsk_geometry() {
        for bits in [[false, false], [false, true], [true, false], [true, true]] {
            let f = qam_modulate(&bits, scheme(4), 1.0).unwrap();
            let s = f.symbols[0];
            assert!((s.re.abs() - FRAC_1_SQRT_2).abs() < 1e-15);
            assert!((s.im.abs() - FRAC_1_SQRT_2).abs() < 1e-15);
        }
    }

    #[test]
    fn grid_has_exact_unit_energy_and_gray_neighbours() {
        for s in [4, 16, 64, 256] {
            let sc = scheme(s);
            let pts = constellation(&sc);
            let e: f64 = pts.iter().map(|p| p.norm_sqr()).sum::<f64>() / pts.len() as f64;
            assert!((e - 1.0).abs() < 1e-12, "S={s}: {e}");
            // nearest horizontal/vertical neighbours differ in exactly one bit
            let d = 2.0 * normalization(&sc);
            for (i, p) in pts.iter().enumerate() {
                for (j, q) in pts.iter().enumerate() {
                    if ((p - q).norm() - d).abs() < 1e-9 {
                        assert_eq!((i ^ j).count_ones(), 1);
                    }
                }
            }
        }
    }

    #[test]
    fn random_payload_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bits = random_bits(&mut rng, 8 * 20_000);
        let f = qam_modulate(&bits, scheme(256), 2.5).unwrap();
        let e = f.symbols.iter().map(|s| s.norm_sqr()).sum::<f64>() / f.len() as f64;
        assert!((e - 1.0).abs() < 0.01, "{e}");
    }

    #[test]
    fn rejects_partial_symbols() {
        assert!(qam_modulate(&[true; 7], scheme(256), 1.0).is_err());
    }

    #[test]
    fn small_displacement_decodes_to_original() {
        let sc = scheme(64);
        let half = normalization(&sc);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bits = random_bits(&mut rng, 6 * 500);
        let mut f = qam_modulate(&bits, sc, 1.0).unwrap();
        for (i, s) in f.symbols.iter_mut().enumerate() {
            let angle = i as f64 * 0.37;
            *s += Complex64::from_polar(0.7 * half, angle);
        }
        assert_eq!(qam_demodulate(&f), bits);
    }

    /// Symbol error rate of square M-QAM in AWGN.
    fn ser_oracle(m: f64, es_n0: f64) -> f64 {
        let q = |x: f64| 0.5 * statrs::function::erf::erfc(x / 2f64.sqrt());
        let p = 2.0 * (1.0 - 1.0 / m.sqrt()) * q((3.0 * es_n0 / (m - 1.0)).sqrt());
        1.0 - (1.0 - p).powi(2)
    }

    #[test]
    fn awgn_ber_at_30db() {
        let sc = scheme(256);
        let es_n0 = 10f64.powf(3.0);
        let sigma = (0.5 / es_n0).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let bits = random_bits(&mut rng, 8 * 50_000);
        let mut f = qam_modulate(&bits, sc, 1.0).unwrap();
        let noise = Normal::new(0.0, sigma).unwrap();
        for s in &mut f.symbols {
            *s += Complex64::new(noise.sample(&mut rng), noise.sample(&mut rng));
        }
        let rx = qam_demodulate(&f);
        let errors = rx.iter().zip(&bits).filter(|(a, b)| a != b).count();
        let ber = errors as f64 / bits.len() as f64;
        // Gray coding: nearly every symbol error flips one bit
        let oracle = ser_oracle(256.0, es_n0) / 8.0;
        assert!(ber < 1e-3, "ber {ber}");
        assert!((ber - oracle).abs() < 0.5 * oracle, "ber {ber} oracle {oracle}");
    }

    proptest! {
        #[test]
        fn roundtrip(bits in proptest::collection::vec(any::<bool>(), 0..64).prop_map(|mut v| { v.truncate(v.len() / 8 * 8); v }),
                     s in prop_oneof![Just(4u32), Just(16), Just(64), Just(256)]) {
            let sc = scheme(s);
            let k = sc.bits_per_symbol() as usize;
            let bits = &bits[..bits.len() / k * k];
            let f = qam_modulate(bits, sc, 1.0).unwrap();
            prop_assert_eq!(qam_demodulate(&f), bits.to_vec());
        }
    }
}
