//! FFT plumbing shared by the electrical and optical models.
//!
//! All frames are treated as one period of a periodic signal, so resampling and frequency
//! relocation are exact bin operations. Plans are cached per thread; buffers are never shared.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

fn inverse_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// Forward transform in place, unnormalised.
pub fn fft(buf: &mut [Complex64]) {
    if buf.len() > 1 {
        forward_plan(buf.len()).process(buf);
    }
}

/// Inverse transform in place, normalised by `1/N`.
pub fn ifft(buf: &mut [Complex64]) {
    let n = buf.len();
    if n > 1 {
        inverse_plan(n).process(buf);
    }
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|v| *v *= scale);
}

/// Reusable forward/inverse pair with private scratch space.
pub struct FftPair {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl FftPair {
    pub fn new(n: usize) -> Self {
        let fwd = forward_plan(n);
        let inv = inverse_plan(n);
        let len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        Self {
            fwd,
            inv,
            scratch: vec![Complex64::default(); len],
        }
    }

    pub fn forward(&mut self, buf: &mut [Complex64]) {
        self.fwd.process_with_scratch(buf, &mut self.scratch);
    }

    /// Unnormalised inverse; callers fold `1/N` into their own scaling.
    pub fn inverse_raw(&mut self, buf: &mut [Complex64]) {
        self.inv.process_with_scratch(buf, &mut self.scratch);
    }
}

/// Signed bin index of bin `k` in an `n`-point transform.
pub fn signed_bin(k: usize, n: usize) -> i64 {
    if k <= (n - 1) / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Frequency of bin `k` (same unit as `rate`).
pub fn bin_freq(k: usize, n: usize, rate: f64) -> f64 {
    signed_bin(k, n) as f64 * rate / n as f64
}

/// Array index of a signed bin.
pub fn bin_index(signed: i64, n: usize) -> usize {
    signed.rem_euclid(n as i64) as usize
}

/// Band-limited resampling of one period to `m` samples.
pub fn resample(x: &[Complex64], m: usize) -> Vec<Complex64> {
    let n = x.len();
    if n == m {
        return x.to_vec();
    }
    let mut spec = x.to_vec();
    fft(&mut spec);
    let out = resample_spectrum(&spec, m);
    let mut y = out;
    ifft(&mut y);
    y
}

/// Move an `n`-bin spectrum onto an `m`-bin grid, scaled so the time signal keeps its amplitude.
pub fn resample_spectrum(spec: &[Complex64], m: usize) -> Vec<Complex64> {
    let n = spec.len();
    let scale = m as f64 / n as f64;
    let h = n.min(m);
    let mut out = vec![Complex64::default(); m];
    for k in 0..h.div_ceil(2) {
        out[k] = spec[k] * scale;
    }
    for k in 1..=(h - 1) / 2 {
        out[m - k] = spec[n - k] * scale;
    }
    if h.is_multiple_of(2) && h > 0 {
        let half = h / 2;
        if n < m {
            let v = spec[half] * (0.5 * scale);
            out[half] = v;
            out[m - half] = v;
        } else {
            out[half] = (spec[half] + if n > m { spec[n - half] } else { Complex64::default() }) * scale;
        }
    }
    out
}

/// Analytic signal of the real part of `x`: negative frequencies removed, positive doubled.
pub fn analytic(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let mut spec: Vec<Complex64> = x.iter().map(|v| Complex64::new(v.re, 0.0)).collect();
    fft(&mut spec);
    analytic_in_spectrum(&mut spec);
    ifft(&mut spec);
    debug_assert_eq!(spec.len(), n);
    spec
}

/// Apply the analytic-signal mask to the spectrum of a real signal.
pub fn analytic_in_spectrum(spec: &mut [Complex64]) {
    let n = spec.len();
    for (k, v) in spec.iter_mut().enumerate() {
        let s = signed_bin(k, n);
        if s > 0 && !(n.is_multiple_of(2) && k == n / 2) {
            *v *= 2.0;
        } else if s < 0 {
            *v = Complex64::default();
        }
    }
}

/// Multiply by `exp(i 2 pi f t)`, `t = k / rate`.
pub fn mix(x: &mut [Complex64], freq: f64, rate: f64) {
    let cycles_per_sample = freq / rate;
    for (k, v) in x.iter_mut().enumerate() {
        let phase = (cycles_per_sample * k as f64).fract() * 2.0 * PI;
        *v *= Complex64::from_polar(1.0, phase);
    }
}

/// Nearest frequency with an integer number of cycles in a frame of `duration` (1/rate units).
pub fn snap_to_frame(freq: f64, duration: f64) -> f64 {
    (freq * duration).round() / duration
}

/// Circularly delay by `delay` (time units of 1/rate); fractional delays are exact for periodic,
/// band-limited frames.
pub fn delay(x: &mut [Complex64], delay: f64, rate: f64) {
    let n = x.len();
    fft(x);
    for (k, v) in x.iter_mut().enumerate() {
        let f = bin_freq(k, n, rate);
        *v *= Complex64::from_polar(1.0, -2.0 * PI * f * delay);
    }
    ifft(x);
}

pub fn energy(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum()
}

pub fn mean_power(x: &[Complex64]) -> f64 {
    energy(x) / x.len() as f64
}

/// `|X_k|^2` of a frame, unnormalised.
pub fn power_spectrum(x: &[Complex64]) -> Vec<f64> {
    let mut s = x.to_vec();
    fft(&mut s);
    s.iter().map(|v| v.norm_sqr()).collect()
}
