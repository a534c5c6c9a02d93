//! Optional OOK transport of the D-RoF sample stream.
//!
//! The serial line carries `per_wavelength_line_rate` Gbps as NRZ on-off keying with average power
//! equal to the laser power setting. The receiver is thermal/shot-noise limited with a
//! bandwidth of half the line rate; fiber nonlinearity is ignored for the digital signal.

use rand::Rng;
use statrs::function::erf::erfc;

use super::scenario::FronthaulScenario;
use crate::dimensioning::per_wavelength_line_rate;
use crate::dsp::sampling::QuantizedStream;
use crate::optics::detector::ELECTRON_CHARGE;
use crate::optics::dbm_to_w;

/// Q factor of the decision on the received NRZ signal.
pub fn ook_q_factor(s: &FronthaulScenario) -> f64 {
    let loss_db = s.fiber.attenuation_db_per_km * s.fiber.length_km - s.fiber.output_gain_db;
    let p_rx = dbm_to_w(s.modulator.laser_power_dbm - loss_db);
    let bandwidth_hz = per_wavelength_line_rate(&s.band, &s.coding) * 1e9 / 2.0;
    let i1 = 2.0 * s.detector.responsivity_a_per_w * p_rx;
    let var0 = s.detector.thermal_noise_a_per_sqrt_hz.powi(2) * bandwidth_hz;
    let shot = if s.detector.shot_noise_enabled {
        2.0 * ELECTRON_CHARGE * i1 * bandwidth_hz
    } else {
        0.0
    };
    let denom = var0.sqrt() + (var0 + shot).sqrt();
    if denom == 0.0 {
        f64::INFINITY
    } else {
        i1 / denom
    }
}

/// `BER = erfc(Q / sqrt 2) / 2`.
pub fn ook_ber(s: &FronthaulScenario) -> f64 {
    let q = ook_q_factor(s);
    if q.is_infinite() {
        0.0
    } else {
        0.5 * erfc(q / std::f64::consts::SQRT_2)
    }
}

/// Flip each line bit independently with probability `ber`. Bits are serialized per sample as
/// I then Q, most significant bit first, in offset-binary code.
pub fn ook_flip_bits<R: Rng>(stream: &mut QuantizedStream, ber: f64, rng: &mut R) -> usize {
    if !(ber > 0.0) {
        return 0;
    }
    let r = stream.quantizer.resolution_bits as usize;
    let total = stream.bit_count();
    // inverse-CDF geometric gaps; exact for any ber, including vanishing ones
    let log_q = (-ber.min(1.0)).ln_1p();
    let mut gap = || {
        let u: f64 = 1.0 - rng.random::<f64>();
        let g = (u.ln() / log_q).floor();
        if g.is_finite() && g < u64::MAX as f64 { g as u64 } else { u64::MAX }
    };
    let mut flips = 0;
    let mut pos = gap();
    while pos < total as u64 {
        let b = pos as usize;
        let sample = b / (2 * r);
        let within = b % (2 * r);
        let codes = if within < r {
            &mut stream.i_codes
        } else {
            &mut stream.q_codes
        };
        let bit = r - 1 - within % r;
        codes[sample] ^= 1 << bit;
        flips += 1;
        pos = pos.saturating_add(gap()).saturating_add(1);
    }
    flips
}
