//! Quadrature up/down-conversion between a complex envelope and a real passband signal.
//!
//! `x(t) = sqrt(2) Re{ b(t) exp(i 2 pi f_c t) }`, so envelope and passband carry the same power.
//! Carriers should complete a whole number of cycles per frame; the harness snaps them.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use super::spectrum::{analytic_in_spectrum, bin_index, fft, ifft, mix, resample, resample_spectrum, signed_bin};
use super::waveform::SampledWaveform;
use crate::error::{Error, Result};

/// Passband at the smallest power-of-two multiple of the envelope rate that holds the carrier.
pub fn upconvert(bb: &SampledWaveform, f_c: f64) -> Result<SampledWaveform> {
    let need = 2.0 * (f_c + bb.sample_rate_ghz() / 2.0);
    let mut factor = 1usize;
    while bb.sample_rate_ghz() * (factor as f64) <= need {
        factor *= 2;
    }
    upconvert_to(bb, f_c, bb.sample_rate_ghz() * factor as f64)
}

pub fn upconvert_to(bb: &SampledWaveform, f_c: f64, out_rate_ghz: f64) -> Result<SampledWaveform> {
    let edge = f_c + bb.sample_rate_ghz() / 2.0;
    if !(f_c > 0.0) || out_rate_ghz <= 2.0 * edge {
        return Err(Error::invalid(
            "upconversion",
            format!("rate {out_rate_ghz} GHz cannot hold content up to {edge} GHz"),
        ));
    }
    let m = (bb.duration_ns() * out_rate_ghz).round() as usize;
    let mut x = resample(bb.samples(), m);
    mix(&mut x, f_c, out_rate_ghz);
    let real = x.into_iter().map(|v| Complex64::new(SQRT_2 * v.re, 0.0)).collect();
    SampledWaveform::new(real, out_rate_ghz, f_c)
}

/// Complex envelope around `f_c`, resampled to `out_rate_ghz`.
///
/// Everything outside `|f - f_c| < out_rate / 2` is discarded.
pub fn downconvert(pass: &SampledWaveform, f_c: f64, out_rate_ghz: f64) -> Result<SampledWaveform> {
    if !(f_c >= 0.0) || f_c >= pass.sample_rate_ghz() / 2.0 {
        return Err(Error::invalid(
            "downconversion",
            format!("carrier {f_c} GHz outside (0, {}) GHz", pass.sample_rate_ghz() / 2.0),
        ));
    }
    let n = pass.len();
    let duration = pass.duration_ns();
    let m = (duration * out_rate_ghz).round() as usize;
    if m == 0 {
        return Err(Error::invalid("downconversion", "output rate too low for frame"));
    }
    let mut spec: Vec<Complex64> = pass.samples().iter().map(|v| Complex64::new(v.re, 0.0)).collect();
    fft(&mut spec);
    analytic_in_spectrum(&mut spec);

    let shift = f_c * duration;
    let on_grid = (shift - shift.round()).abs() < 1e-6;
    let out = if on_grid {
        // carrier is an exact bin: relocate the spectrum directly
        let s = shift.round() as i64;
        let scale = m as f64 / n as f64 / SQRT_2;
        let mut out = vec![Complex64::default(); m];
        for (k, v) in out.iter_mut().enumerate() {
            let src = signed_bin(k, m) + s;
            if src.unsigned_abs() as usize <= (n - 1) / 2 {
                *v = spec[bin_index(src, n)] * scale;
            }
        }
        ifft(&mut out);
        out
    } else {
        ifft(&mut spec);
        mix(&mut spec, -f_c, pass.sample_rate_ghz());
        spec.iter_mut().for_each(|v| *v /= SQRT_2);
        let mut s = spec;
        fft(&mut s);
        let mut out = resample_spectrum(&s, m);
        ifft(&mut out);
        out
    };
    SampledWaveform::new(out, out_rate_ghz, 0.0)
}
