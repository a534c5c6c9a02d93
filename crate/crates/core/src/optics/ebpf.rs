use std::f64::consts::PI;

use crate::dsp::spectrum::{bin_freq, fft, ifft};
use crate::dsp::waveform::SampledWaveform;
use crate::error::{Error, Result};

/// Transition width of the filter skirts as a fraction of the passband width.
pub const EBPF_TRANSITION_FRACTION: f64 = 0.25;

/// Zero-phase bandpass filter: flat over `center +- bandwidth/2`, raised-cosine skirts of width
/// `EBPF_TRANSITION_FRACTION * bandwidth` on each side, zero elsewhere.
pub fn electrical_bandpass(rf: &SampledWaveform, center_ghz: f64, bandwidth_ghz: f64) -> Result<SampledWaveform> {
    let nyquist = rf.sample_rate_ghz() / 2.0;
    let skirt = EBPF_TRANSITION_FRACTION * bandwidth_ghz;
    let lo = center_ghz - bandwidth_ghz / 2.0;
    let hi = center_ghz + bandwidth_ghz / 2.0;
    if !(bandwidth_ghz > 0.0) || lo - skirt <= 0.0 || hi + skirt >= nyquist {
        return Err(Error::invalid(
            "bandpass filter",
            format!("band {lo}..{hi} GHz with {skirt} GHz skirts outside (0, {nyquist}) GHz"),
        ));
    }
    let gain = |f: f64| {
        let f = f.abs();
        let d = if f < lo { lo - f } else if f > hi { f - hi } else { 0.0 };
        if d >= skirt {
            0.0
        } else {
            0.5 * (1.0 + (PI * d / skirt).cos())
        }
    };
    let mut x = rf.samples().to_vec();
    let n = x.len();
    fft(&mut x);
    for (k, v) in x.iter_mut().enumerate() {
        *v *= gain(bin_freq(k, n, rf.sample_rate_ghz()));
    }
    ifft(&mut x);
    let real = rf.samples().iter().all(|v| v.im == 0.0);
    if real {
        x.iter_mut().for_each(|v| v.im = 0.0);
    }
    SampledWaveform::new(x, rf.sample_rate_ghz(), center_ghz)
}
