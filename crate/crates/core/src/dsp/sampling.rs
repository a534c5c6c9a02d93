//! Quadrature bandpass sampling, uniform quantization and DAC reconstruction (the D-RoF branch).
//!
//! The real passband signal is turned into its analytic form and sampled directly at the minimum
//! bandpass rate, which aliases the band down without any mixing. Each of the I and Q streams is
//! quantized to `R` bits. The rate is rounded up to the nearest value that puts a whole number of
//! samples in the frame so the stream stays periodic; the rounded rate is checked against the
//! Nyquist zone and reported.

use num_complex::Complex64;

use super::spectrum::{analytic_in_spectrum, bin_freq, fft, ifft, signed_bin};
use super::waveform::SampledWaveform;
use crate::dimensioning::{max_zone_index, min_sampling_rate, sampling_rate_range, RfBandPlan};
use crate::error::{Error, Result};

/// Uniform mid-rise quantizer with `2^R` levels spanning `[-full_scale, full_scale]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerSpec {
    pub resolution_bits: u32,
    pub full_scale: f64,
}

impl QuantizerSpec {
    pub fn new(resolution_bits: u32, full_scale: f64) -> Result<Self> {
        if !(1..=30).contains(&resolution_bits) {
            return Err(Error::invalid("quantizer", format!("{resolution_bits} bits")));
        }
        if !(full_scale.is_finite() && full_scale > 0.0) {
            return Err(Error::invalid("quantizer", format!("full scale {full_scale}")));
        }
        Ok(Self {
            resolution_bits,
            full_scale,
        })
    }

    pub fn levels(&self) -> u32 {
        1 << self.resolution_bits
    }

    /// Step size `2 FS / 2^R`.
    pub fn step(&self) -> f64 {
        2.0 * self.full_scale / f64::from(self.levels())
    }

    /// Level index in `0..2^R`; inputs beyond full scale clip to the outer levels.
    pub fn encode(&self, v: f64) -> u32 {
        let half = f64::from(self.levels() / 2);
        let idx = (v / self.step()).floor() + half;
        idx.clamp(0.0, f64::from(self.levels() - 1)) as u32
    }

    pub fn decode(&self, code: u32) -> f64 {
        (f64::from(code) - f64::from(self.levels() / 2) + 0.5) * self.step()
    }

    pub fn clips(&self, v: f64) -> bool {
        v.abs() > self.full_scale
    }
}

/// Quantized I/Q sample stream plus what the receiver needs to rebuild the passband.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedStream {
    pub i_codes: Vec<u32>,
    pub q_codes: Vec<u32>,
    pub quantizer: QuantizerSpec,
    pub band: RfBandPlan,
    /// Rate actually used: the smallest frame-periodic rate not below `nominal_rate_ghz`.
    pub sample_rate_ghz: f64,
    /// Minimum bandpass sampling rate of `band`.
    pub nominal_rate_ghz: f64,
    pub zone: u32,
    pub frame_duration_ns: f64,
    pub clip_fraction: f64,
}

impl QuantizedStream {
    pub fn len(&self) -> usize {
        self.i_codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.i_codes.is_empty()
    }

    /// Dequantized complex samples.
    pub fn samples(&self) -> Vec<Complex64> {
        self.i_codes
            .iter()
            .zip(&self.q_codes)
            .map(|(&i, &q)| Complex64::new(self.quantizer.decode(i), self.quantizer.decode(q)))
            .collect()
    }

    /// Serial line bits: per sample, I then Q, each `R` bits MSB first.
    pub fn bit_count(&self) -> usize {
        self.len() * 2 * self.quantizer.resolution_bits as usize
    }
}

/// Fraction of the real passband energy lying outside `[low, high]` GHz, and the occupied edges.
fn band_occupancy(spec: &[Complex64], rate: f64, low: f64, high: f64) -> (f64, f64, f64) {
    let n = spec.len();
    let mut total = 0.0;
    let mut outside = 0.0;
    let mut lo_edge = f64::INFINITY;
    let mut hi_edge = 0.0f64;
    let peak = spec.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    for (k, v) in spec.iter().enumerate() {
        let f = bin_freq(k, n, rate);
        if f <= 0.0 {
            continue;
        }
        let p = v.norm_sqr();
        total += p;
        if f < low || f > high {
            outside += p;
        }
        if p > peak * 1e-8 {
            lo_edge = lo_edge.min(f);
            hi_edge = hi_edge.max(f);
        }
    }
    let frac = if total > 0.0 { outside / total } else { 0.0 };
    (frac, lo_edge, hi_edge)
}

/// Maximum out-of-band energy fraction accepted before sampling is refused.
pub const MAX_OUT_OF_BAND: f64 = 1e-6;

pub fn bandpass_sample_quantize(
    pass: &SampledWaveform,
    band: &RfBandPlan,
    q: &QuantizerSpec,
) -> Result<QuantizedStream> {
    let n = pass.len();
    let mut spec: Vec<Complex64> = pass.samples().iter().map(|v| Complex64::new(v.re, 0.0)).collect();
    fft(&mut spec);

    let (oob, lo, hi) = band_occupancy(&spec, pass.sample_rate_ghz(), band.f_min_ghz(), band.f_max_ghz());
    if oob > MAX_OUT_OF_BAND {
        return Err(Error::BandViolation {
            low_ghz: lo,
            high_ghz: hi,
            min_ghz: band.f_min_ghz(),
            max_ghz: band.f_max_ghz(),
        });
    }

    let duration = pass.duration_ns();
    let nominal = min_sampling_rate(band);
    let zone = max_zone_index(band);
    let m = (nominal * duration - 1e-9).ceil() as usize;
    let rate = m as f64 / duration;
    let range = sampling_rate_range(band, zone)?;
    if !range.contains(rate) {
        return Err(Error::invalid(
            "sampling rate",
            format!(
                "frame-periodic rate {rate} GHz leaves zone {zone} [{}, {}]; use a longer frame",
                range.low_ghz, range.high_ghz
            ),
        ));
    }

    // sampling the periodic analytic signal at m points folds bin k onto bin k mod m
    analytic_in_spectrum(&mut spec);
    let mut folded = vec![Complex64::default(); m];
    let scale = m as f64 / n as f64;
    for (k, v) in spec.iter().enumerate() {
        let s = signed_bin(k, n);
        if s > 0 {
            folded[(s as usize) % m] += v * scale;
        }
    }
    ifft(&mut folded);

    let mut clipped = 0usize;
    let mut i_codes = Vec::with_capacity(m);
    let mut q_codes = Vec::with_capacity(m);
    for v in &folded {
        clipped += usize::from(q.clips(v.re)) + usize::from(q.clips(v.im));
        i_codes.push(q.encode(v.re));
        q_codes.push(q.encode(v.im));
    }
    Ok(QuantizedStream {
        i_codes,
        q_codes,
        quantizer: *q,
        band: *band,
        sample_rate_ghz: rate,
        nominal_rate_ghz: nominal,
        zone,
        frame_duration_ns: duration,
        clip_fraction: clipped as f64 / (2 * m) as f64,
    })
}

fn output_len(stream: &QuantizedStream, target_rate_ghz: f64) -> Result<usize> {
    let n = (stream.frame_duration_ns * target_rate_ghz).round() as usize;
    if n < stream.len() {
        return Err(Error::invalid(
            "reconstruction rate",
            format!("{target_rate_ghz} GHz is below the stream rate"),
        ));
    }
    Ok(n)
}

/// Band-limited interpolation of the dequantized I/Q stream to `target_rate_ghz`, without moving
/// it out of the sampled (aliased) band.
pub fn interpolate_iq(stream: &QuantizedStream, target_rate_ghz: f64) -> Result<SampledWaveform> {
    let n = output_len(stream, target_rate_ghz)?;
    let y = super::spectrum::resample(&stream.samples(), n);
    SampledWaveform::new(y, target_rate_ghz, 0.0)
}

/// DAC: place every aliased bin back at its frequency inside `[f_min, f_max]`, discard the rest,
/// and return the real passband at `target_rate_ghz`.
pub fn dac_reconstruct(stream: &QuantizedStream, target_rate_ghz: f64) -> Result<SampledWaveform> {
    let n = output_len(stream, target_rate_ghz)?;
    let m = stream.len();
    let duration = stream.frame_duration_ns;
    if target_rate_ghz <= 2.0 * stream.band.f_max_ghz() {
        return Err(Error::invalid(
            "reconstruction rate",
            format!("{target_rate_ghz} GHz cannot hold {} GHz", stream.band.f_max_ghz()),
        ));
    }
    let mut y = stream.samples();
    fft(&mut y);
    let lo_bin = (stream.band.f_min_ghz() * duration).ceil() as i64;
    let hi_bin = (stream.band.f_max_ghz() * duration).floor() as i64;
    let scale = n as f64 / m as f64;
    let mut spec = vec![Complex64::default(); n];
    for k in lo_bin.max(1)..=hi_bin {
        if (k as usize) < n / 2 {
            spec[k as usize] = y[(k as usize) % m] * scale;
        }
    }
    ifft(&mut spec);
    let real = spec.into_iter().map(|v| Complex64::new(v.re, 0.0)).collect();
    SampledWaveform::new(real, target_rate_ghz, stream.band.carrier_freq_ghz())
}
