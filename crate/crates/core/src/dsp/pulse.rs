//! Root-raised-cosine transmit and matched filters.
//!
//! Frames are periodic: shaping and matched filtering wrap around the frame, so there are no
//! start-up transients and every symbol sees the same channel. A filter is either a truncated
//! FIR of `span` symbols or the untruncated response applied per frame in the frequency domain;
//! only the latter is strictly band-limited.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use super::qam::SymbolFrame;
use super::spectrum::{bin_freq, fft, ifft};
use super::waveform::SampledWaveform;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Response {
    Truncated(Vec<f64>),
    Periodic,
}

/// RRC filter at `sps` samples per symbol with a unit-energy impulse response.
#[derive(Debug, Clone, PartialEq)]
pub struct RrcFilter {
    response: Response,
    sps: usize,
    rolloff: f64,
}

fn check(rolloff: f64, sps: usize) -> Result<()> {
    if !(0.0..=1.0).contains(&rolloff) {
        return Err(Error::invalid("rolloff", format!("{rolloff} outside [0, 1]")));
    }
    if sps < 2 {
        return Err(Error::invalid("oversampling", format!("{sps} < 2")));
    }
    Ok(())
}

impl RrcFilter {
    /// FIR of `span_symbols * sps + 1` taps.
    pub fn new(rolloff: f64, sps: usize, span_symbols: usize) -> Result<Self> {
        check(rolloff, sps)?;
        if span_symbols == 0 || !span_symbols.is_multiple_of(2) {
            return Err(Error::invalid(
                "filter span",
                format!("{span_symbols} symbols; must be a positive even count"),
            ));
        }
        let n = span_symbols * sps + 1;
        let centre = (n / 2) as f64;
        let mut taps: Vec<f64> = (0..n)
            .map(|i| rrc_impulse((i as f64 - centre) / sps as f64, rolloff))
            .collect();
        let norm = taps.iter().map(|t| t * t).sum::<f64>().sqrt();
        taps.iter_mut().for_each(|t| *t /= norm);
        Ok(Self {
            response: Response::Truncated(taps),
            sps,
            rolloff,
        })
    }

    /// Untruncated response; the cascade is exactly Nyquist and the spectrum exactly confined.
    pub fn periodic(rolloff: f64, sps: usize) -> Result<Self> {
        check(rolloff, sps)?;
        Ok(Self {
            response: Response::Periodic,
            sps,
            rolloff,
        })
    }

    /// FIR taps; empty for the periodic form.
    pub fn taps(&self) -> &[f64] {
        match &self.response {
            Response::Truncated(t) => t,
            Response::Periodic => &[],
        }
    }

    pub fn is_periodic(&self) -> bool {
        self.response == Response::Periodic
    }

    pub fn sps(&self) -> usize {
        self.sps
    }

    pub fn rolloff(&self) -> f64 {
        self.rolloff
    }

    fn centre(&self) -> usize {
        self.taps().len() / 2
    }

    /// Unit-energy frequency response on an `n`-bin frame grid.
    fn frame_response(&self, n: usize) -> Vec<f64> {
        let sps = self.sps as f64;
        let mut h: Vec<f64> = (0..n)
            .map(|k| rrc_spectrum(bin_freq(k, n, sps), self.rolloff))
            .collect();
        let e: f64 = h.iter().map(|v| v * v).sum();
        let scale = (n as f64 / e).sqrt();
        h.iter_mut().for_each(|v| *v *= scale);
        h
    }

    /// Upsample and filter `symbols` into a periodic waveform of `len * sps` samples.
    pub fn shape(&self, symbols: &[Complex64]) -> Vec<Complex64> {
        let len = symbols.len() * self.sps;
        let mut out = vec![Complex64::default(); len];
        match &self.response {
            Response::Periodic => {
                for (k, &s) in symbols.iter().enumerate() {
                    out[k * self.sps] = s;
                }
                fft(&mut out);
                for (v, h) in out.iter_mut().zip(self.frame_response(len)) {
                    *v *= h;
                }
                ifft(&mut out);
            }
            Response::Truncated(taps) => {
                let c = self.centre() as i64;
                for (k, &s) in symbols.iter().enumerate() {
                    if s == Complex64::default() {
                        continue;
                    }
                    let base = (k * self.sps) as i64 - c;
                    for (j, &h) in taps.iter().enumerate() {
                        let idx = (base + j as i64).rem_euclid(len as i64) as usize;
                        out[idx] += s * h;
                    }
                }
            }
        }
        out
    }

    /// Matched-filter the periodic waveform and take one sample per symbol at offset 0.
    pub fn matched_sample(&self, wave: &[Complex64]) -> Vec<Complex64> {
        let len = wave.len();
        match &self.response {
            Response::Periodic => {
                let mut y = wave.to_vec();
                fft(&mut y);
                for (v, h) in y.iter_mut().zip(self.frame_response(len)) {
                    *v *= h;
                }
                ifft(&mut y);
                y.into_iter().step_by(self.sps).take(len / self.sps).collect()
            }
            Response::Truncated(taps) => {
                let c = self.centre() as i64;
                (0..len / self.sps)
                    .map(|k| {
                        let base = (k * self.sps) as i64 - c;
                        taps.iter()
                            .enumerate()
                            .map(|(j, &h)| wave[(base + j as i64).rem_euclid(len as i64) as usize] * h)
                            .sum()
                    })
                    .collect()
            }
        }
    }
}

/// RRC amplitude spectrum, `f` in units of the symbol rate, unit passband gain.
pub fn rrc_spectrum(f: f64, beta: f64) -> f64 {
    let f = f.abs();
    let lo = (1.0 - beta) / 2.0;
    let hi = (1.0 + beta) / 2.0;
    if f <= lo {
        1.0
    } else if f >= hi {
        0.0
    } else {
        (0.5 * (1.0 + (PI / beta * (f - lo)).cos())).sqrt()
    }
}

/// Continuous RRC impulse response, `t` in symbol periods, peak-normalised to the usual form.
pub fn rrc_impulse(t: f64, beta: f64) -> f64 {
    if t.abs() < 1e-12 {
        return 1.0 - beta + 4.0 * beta / PI;
    }
    if beta > 0.0 && (t.abs() - 1.0 / (4.0 * beta)).abs() < 1e-9 {
        let a = PI / (4.0 * beta);
        return beta * FRAC_1_SQRT_2 * ((1.0 + 2.0 / PI) * a.sin() + (1.0 - 2.0 / PI) * a.cos());
    }
    let num = (PI * t * (1.0 - beta)).sin() + 4.0 * beta * t * (PI * t * (1.0 + beta)).cos();
    let den = PI * t * (1.0 - (4.0 * beta * t).powi(2));
    num / den
}

/// Occupied double-sided bandwidth of an RRC-shaped signal.
pub fn occupied_bandwidth(symbol_rate: f64, rolloff: f64) -> f64 {
    symbol_rate * (1.0 + rolloff)
}

/// Baseband waveform at `symbol_rate * oversampling`, truncated FIR of `span_symbols`.
pub fn pulse_shape(
    frame: &SymbolFrame,
    rolloff: f64,
    oversampling: usize,
    span_symbols: usize,
) -> Result<SampledWaveform> {
    pulse_shape_with(frame, &RrcFilter::new(rolloff, oversampling, span_symbols)?)
}

pub fn pulse_shape_with(frame: &SymbolFrame, filter: &RrcFilter) -> Result<SampledWaveform> {
    SampledWaveform::new(
        filter.shape(&frame.symbols),
        frame.symbol_rate_gbaud * filter.sps() as f64,
        0.0,
    )
}

/// Matched filter and ideal-timing decimation back to symbols.
pub fn matched_filter(
    wave: &SampledWaveform,
    filter: &RrcFilter,
    template: &SymbolFrame,
) -> Result<SymbolFrame> {
    let expected = template.symbol_rate_gbaud * filter.sps() as f64;
    if (wave.sample_rate_ghz() - expected).abs() > 1e-9 * expected {
        return Err(Error::invalid(
            "matched filter",
            format!("waveform rate {} GHz, filter expects {expected}", wave.sample_rate_ghz()),
        ));
    }
    Ok(SymbolFrame {
        symbols: filter.matched_sample(wave.samples()),
        scheme: template.scheme,
        symbol_rate_gbaud: template.symbol_rate_gbaud,
    })
}
