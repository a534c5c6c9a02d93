//! Scalar NLSE `dA/dz = -(a/2) A - i(b2/2) d2A/dt2 + (b3/6) d3A/dt3 + i g |A|^2 A`, symmetric
//! split-step Fourier integration. Internally time is in ps, angular frequency in rad/ps,
//! distance in km.

use std::f64::consts::{LN_10, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::OpticalField;
use crate::dsp::spectrum::{bin_freq, FftPair};
use crate::error::{Error, Result};

/// Speed of light in nm/ps.
pub const C_NM_PER_PS: f64 = 2.997_924_58e5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FiberParams {
    pub length_km: f64,
    pub attenuation_db_per_km: f64,
    pub dispersion_ps_nm_km: f64,
    pub dispersion_slope_ps_nm2_km: f64,
    pub gamma_per_w_km: f64,
    /// Noiseless lumped gain applied at the fiber output.
    pub output_gain_db: f64,
}

impl Default for FiberParams {
    fn default() -> Self {
        Self {
            length_km: 15.0,
            attenuation_db_per_km: 0.35,
            dispersion_ps_nm_km: 0.5,
            dispersion_slope_ps_nm2_km: 0.0,
            gamma_per_w_km: 1.3,
            output_gain_db: 0.0,
        }
    }
}

impl FiberParams {
    pub fn validate(&self) -> Result<()> {
        let check = |what: &'static str, v: f64, ok: bool| {
            if ok && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(what, format!("{v}")))
            }
        };
        check("length_km", self.length_km, self.length_km >= 0.0)?;
        check("attenuation_db_per_km", self.attenuation_db_per_km, self.attenuation_db_per_km >= 0.0)?;
        check("gamma_per_w_km", self.gamma_per_w_km, self.gamma_per_w_km >= 0.0)?;
        check("dispersion_ps_nm_km", self.dispersion_ps_nm_km, true)?;
        check("dispersion_slope_ps_nm2_km", self.dispersion_slope_ps_nm2_km, true)?;
        check("output_gain_db", self.output_gain_db, true)
    }

    /// Field attenuation coefficient in 1/km (power loss `exp(-a z)`).
    pub fn alpha_per_km(&self) -> f64 {
        self.attenuation_db_per_km * LN_10 / 10.0
    }

    /// `b2 = -D l^2 / (2 pi c)` in ps^2/km.
    pub fn beta2_ps2_per_km(&self, wavelength_nm: f64) -> f64 {
        -self.dispersion_ps_nm_km * wavelength_nm * wavelength_nm / (2.0 * PI * C_NM_PER_PS)
    }

    /// `b3 = (l / 2 pi c)^2 (l^2 S + 2 l D)` in ps^3/km.
    /// Zero when no slope is configured.
    pub fn beta3_ps3_per_km(&self, wavelength_nm: f64) -> f64 {
        if self.dispersion_slope_ps_nm2_km == 0.0 {
            return 0.0;
        }
        let l = wavelength_nm;
        (l / (2.0 * PI * C_NM_PER_PS)).powi(2)
            * (l * l * self.dispersion_slope_ps_nm2_km + 2.0 * l * self.dispersion_ps_nm_km)
    }

    /// Group delay of content at physical offset `offset_ghz` relative to the carrier, in ns.
    pub fn group_delay_ns(&self, wavelength_nm: f64, offset_ghz: f64) -> f64 {
        let w = 2.0 * PI * offset_ghz * 1e-3;
        let b2 = self.beta2_ps2_per_km(wavelength_nm);
        let b3 = self.beta3_ps3_per_km(wavelength_nm);
        (b2 * w + 0.5 * b3 * w * w) * self.length_km * 1e-3
    }

    /// Dispersion parameter giving `beta2` at `wavelength_nm`.
    pub fn dispersion_for_beta2(beta2_ps2_per_km: f64, wavelength_nm: f64) -> f64 {
        -beta2_ps2_per_km * 2.0 * PI * C_NM_PER_PS / (wavelength_nm * wavelength_nm)
    }
}

/// Step-size control.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StepControl {
    /// Uniform steps no longer than `step_km`.
    Fixed { step_km: f64 },
    /// Each step bounded so that the peak nonlinear phase stays below `max_phase_rad`.
    Adaptive { max_phase_rad: f64, max_step_km: f64 },
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl::Fixed { step_km: 0.1 }
    }
}

/// Linear operator exponent per km, per frequency bin.
fn linear_operator(n: usize, rate_ghz: f64, b2: f64, b3: f64, alpha: f64) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let w = 2.0 * PI * bin_freq(k, n, rate_ghz) * 1e-3;
            Complex64::new(-alpha / 2.0, b2 / 2.0 * w * w - b3 / 6.0 * w * w * w)
        })
        .collect()
}

fn apply_linear(spec: &mut [Complex64], op: &[Complex64], h: f64) {
    spec.iter_mut().zip(op).for_each(|(v, d)| *v *= (d * h).exp());
}

/// `exp(op * h)` with the inverse-FFT normalization folded in.
fn linear_factors(op: &[Complex64], h: f64, scale: f64) -> Vec<Complex64> {
    op.iter().map(|d| (d * h).exp() * scale).collect()
}

fn multiply(spec: &mut [Complex64], factors: &[Complex64]) {
    spec.iter_mut().zip(factors).for_each(|(v, f)| *v *= f);
}

/// Kerr rotation; returns false on non-finite samples.
fn apply_kerr(x: &mut [Complex64], gamma_h: f64) -> bool {
    let mut finite = true;
    for v in x.iter_mut() {
        let p = v.norm_sqr();
        finite &= p.is_finite();
        *v *= Complex64::from_polar(1.0, gamma_h * p);
    }
    finite
}

fn peak_power(x: &[Complex64]) -> f64 {
    x.iter().fold(0.0f64, |m, v| m.max(v.norm_sqr()))
}

pub fn fiber_propagate(field: &OpticalField, fiber: &FiberParams, step: StepControl) -> Result<OpticalField> {
    fiber.validate()?;
    let n = field.len();
    let length = fiber.length_km;
    let wl = field.center_wavelength_nm();
    let op = linear_operator(
        n,
        field.sample_rate_ghz(),
        fiber.beta2_ps2_per_km(wl),
        fiber.beta3_ps3_per_km(wl),
        fiber.alpha_per_km(),
    );
    let gamma = fiber.gamma_per_w_km;
    let mut fft = FftPair::new(n);
    let inv_n = 1.0 / n as f64;
    let mut x = field.envelope().to_vec();

    if length > 0.0 && op.iter().all(|d| *d == Complex64::default()) {
        // Kerr-only fiber: |A| is invariant, so the whole length is one exact rotation
        if !apply_kerr(&mut x, gamma * length) {
            return Err(Error::NonFinite { z_km: 0.0 });
        }
        if let StepControl::Fixed { step_km } = step {
            if !(step_km > 0.0 && step_km.is_finite()) {
                return Err(Error::invalid("step_km", format!("{step_km}")));
            }
        }
    } else if length > 0.0 {
        match step {
            StepControl::Fixed { step_km } => {
                if !(step_km > 0.0 && step_km.is_finite()) {
                    return Err(Error::invalid("step_km", format!("{step_km}")));
                }
                let steps = (length / step_km - 1e-9).ceil().max(1.0) as usize;
                let h = length / steps as f64;
                // half steps of neighbouring linear operators are merged
                let half = linear_factors(&op, h / 2.0, inv_n);
                let full = linear_factors(&op, h, inv_n);
                fft.forward(&mut x);
                multiply(&mut x, &half);
                for s in 0..steps {
                    fft.inverse_raw(&mut x);
                    if !apply_kerr(&mut x, gamma * h) {
                        return Err(Error::NonFinite { z_km: (s as f64 + 0.5) * h });
                    }
                    fft.forward(&mut x);
                    multiply(&mut x, if s + 1 == steps { &half } else { &full });
                }
                fft.inverse_raw(&mut x);
            }
            StepControl::Adaptive {
                max_phase_rad,
                max_step_km,
            } => {
                if !(max_phase_rad > 0.0 && max_step_km > 0.0) {
                    return Err(Error::invalid("adaptive step", format!("{max_phase_rad} rad, {max_step_km} km")));
                }
                let mut z = 0.0;
                while z < length * (1.0 - 1e-12) {
                    let p = peak_power(&x);
                    if !p.is_finite() {
                        return Err(Error::NonFinite { z_km: z });
                    }
                    let bound = if gamma * p > 0.0 { max_phase_rad / (gamma * p) } else { f64::INFINITY };
                    let h = bound.min(max_step_km).min(length - z);
                    fft.forward(&mut x);
                    apply_linear(&mut x, &op, h / 2.0);
                    fft.inverse_raw(&mut x);
                    x.iter_mut().for_each(|v| *v *= inv_n);
                    apply_kerr(&mut x, gamma * h);
                    fft.forward(&mut x);
                    apply_linear(&mut x, &op, h / 2.0);
                    fft.inverse_raw(&mut x);
                    x.iter_mut().for_each(|v| *v *= inv_n);
                    z += h;
                }
            }
        }
    }

    if fiber.output_gain_db != 0.0 {
        let g = 10f64.powf(fiber.output_gain_db / 20.0);
        x.iter_mut().for_each(|v| *v *= g);
    }
    if x.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite { z_km: length });
    }
    field.with_envelope(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::spectrum::{energy, fft as fwd};
    use proptest::prelude::*;

    const RATE: f64 = 640.0;

    fn gaussian(n: usize, t0_ps: f64, peak_w: f64, chirp_free_offset_ps: f64) -> OpticalField {
        let dt = 1000.0 / RATE;
        let env = (0..n)
            .map(|k| {
                let t = (k as f64 - n as f64 / 2.0) * dt - chirp_free_offset_ps;
                Complex64::new(peak_w.sqrt() * (-t * t / (2.0 * t0_ps * t0_ps)).exp(), 0.0)
            })
            .collect();
        OpticalField::single(env, RATE, 1310.0).unwrap()
    }

    fn fiber(len: f64, att: f64, beta2: f64, gamma: f64) -> FiberParams {
        FiberParams {
            length_km: len,
            attenuation_db_per_km: att,
            dispersion_ps_nm_km: FiberParams::dispersion_for_beta2(beta2, 1310.0),
            dispersion_slope_ps_nm2_km: 0.0,
            gamma_per_w_km: gamma,
            output_gain_db: 0.0,
        }
    }

    /// RMS width of |A|^2 in ps.
    fn rms_width(f: &OpticalField) -> f64 {
        let dt = 1000.0 / f.sample_rate_ghz();
        let p = f.power_w();
        let total: f64 = p.iter().sum();
        let mean: f64 = p.iter().enumerate().map(|(k, v)| k as f64 * dt * v).sum::<f64>() / total;
        let var: f64 = p
            .iter()
            .enumerate()
            .map(|(k, v)| (k as f64 * dt - mean).powi(2) * v)
            .sum::<f64>()
            / total;
        var.sqrt()
    }

    #[test]
    fn beta2_at_1310() {
        let b2 = FiberParams::default().beta2_ps2_per_km(1310.0);
        assert!((b2 + 0.4555).abs() < 1e-3, "{b2}");
        assert_eq!(FiberParams::default().beta3_ps3_per_km(1310.0), 0.0);
    }

    #[test]
    fn attenuation_only() {
        let f = gaussian(1024, 20.0, 0.01, 0.0);
        let out = fiber_propagate(&f, &fiber(15.0, 0.35, 0.0, 0.0), StepControl::default()).unwrap();
        let expect = 10f64.powf(-0.35 * 15.0 / 10.0);
        assert!((out.mean_power_w() / f.mean_power_w() - expect).abs() < 1e-12 * expect);
        for (a, b) in f.power_w().iter().zip(out.power_w()) {
            if *a > 1e-3 * 0.01 {
                assert!((b / a - expect).abs() < 1e-12 * expect);
            }
        }
    }

    #[test]
    fn spm_only() {
        let f = gaussian(1024, 20.0, 0.05, 0.0);
        let out = fiber_propagate(&f, &fiber(15.0, 0.0, 0.0, 1.3), StepControl::default()).unwrap();
        let mut peak_phase = 0.0f64;
        for (a, b) in f.envelope().iter().zip(out.envelope()) {
            assert!((a.norm() - b.norm()).abs() <= 1e-15 * a.norm());
            let expect = a * Complex64::from_polar(1.0, 1.3 * a.norm_sqr() * 15.0);
            assert!((b - expect).norm() < 1e-12);
            peak_phase = peak_phase.max((b / a).arg());
        }
        assert!((peak_phase - 1.3 * 0.05 * 15.0).abs() < 1e-6);
    }

    #[test]
    fn gaussian_broadening() {
        // T0 = 5 ps, b2 = -20 ps^2/km over 2 km: L_D = 1.25 km
        let t0 = 5.0;
        let b2 = -20.0;
        let len = 2.0;
        let f = gaussian(8192, t0, 1e-3, 0.0);
        let out = fiber_propagate(&f, &fiber(len, 0.0, b2, 0.0), StepControl::default()).unwrap();
        let w0 = rms_width(&f);
        let w1 = rms_width(&out);
        let expect = (1.0 + (b2 * len / (t0 * t0)).powi(2)).sqrt();
        assert!((w1 / w0 / expect - 1.0).abs() < 1e-3, "{} vs {expect}", w1 / w0);
        assert!((w0 - t0 / 2f64.sqrt()).abs() < 1e-6 * t0);
    }

    #[test]
    fn lossless_linear_conserves_energy() {
        let f = gaussian(4096, 3.0, 1e-2, 0.0);
        for b2 in [-50.0, -0.45, 10.0] {
            let out = fiber_propagate(&f, &fiber(15.0, 0.0, b2, 0.0), StepControl::default()).unwrap();
            assert!((out.energy() - f.energy()).abs() < 1e-9 * f.energy());
        }
    }

    #[test]
    fn group_delay_matches_walkoff() {
        // a pulse shifted to +50 GHz physical offset moves by b2 * w * L
        let f = gaussian(8192, 10.0, 1e-3, 0.0);
        let fib = fiber(10.0, 0.0, -20.0, 0.0);
        let mut env = f.envelope().to_vec();
        crate::dsp::spectrum::mix(&mut env, -50.0, RATE);
        let shifted = f.with_envelope(env).unwrap();
        let out = fiber_propagate(&shifted, &fib, StepControl::default()).unwrap();
        let centroid = |f: &OpticalField| {
            let p = f.power_w();
            let dt = 1.0 / RATE;
            p.iter().enumerate().map(|(k, v)| k as f64 * dt * v).sum::<f64>() / p.iter().sum::<f64>()
        };
        let moved = centroid(&out) - centroid(&shifted);
        let expect = fib.group_delay_ns(1310.0, 50.0);
        assert!((moved - expect).abs() < 1e-3 * expect.abs(), "{moved} vs {expect}");
    }

    #[test]
    fn step_convergence_is_second_order() {
        let f = gaussian(1024, 8.0, 0.5, 0.0);
        let fib = fiber(5.0, 0.2, -20.0, 1.3);
        let run = |h: f64| fiber_propagate(&f, &fib, StepControl::Fixed { step_km: h }).unwrap();
        let reference = run(5.0 / 2048.0);
        let err = |h: f64| {
            let o = run(h);
            o.envelope()
                .iter()
                .zip(reference.envelope())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        let e1 = err(0.5);
        let e2 = err(0.25);
        let e3 = err(0.125);
        assert!(e1 / e2 >= 3.0 && e2 / e3 >= 3.0, "{e1} {e2} {e3}");
    }

    #[test]
    fn adaptive_agrees_with_fine_fixed() {
        let f = gaussian(1024, 8.0, 0.5, 0.0);
        let fib = fiber(5.0, 0.2, -20.0, 1.3);
        let a = fiber_propagate(&f, &fib, StepControl::Adaptive { max_phase_rad: 1e-3, max_step_km: 0.5 }).unwrap();
        let b = fiber_propagate(&f, &fib, StepControl::Fixed { step_km: 5e-4 }).unwrap();
        let d: f64 = a.envelope().iter().zip(b.envelope()).map(|(x, y)| (x - y).norm_sqr()).sum();
        assert!(d / energy(b.envelope()) < 1e-8);
    }

    #[test]
    fn fwm_idlers_emerge() {
        let n = 4096;
        let rate = 1280.0;
        let dur = n as f64 / rate;
        let (f1, f2) = (snap_to_grid(-50.0, dur), snap_to_grid(50.0, dur));
        let env: Vec<Complex64> = (0..n)
            .map(|k| {
                let t = k as f64 / rate;
                (Complex64::from_polar(1.0, 2.0 * PI * f1 * t) + Complex64::from_polar(1.0, 2.0 * PI * f2 * t)) * 0.1
            })
            .collect();
        let field = OpticalField::single(env, rate, 1310.0).unwrap();
        let out = fiber_propagate(&field, &fiber(15.0, 0.0, 0.0, 1.3), StepControl::default()).unwrap();
        let mut s = out.envelope().to_vec();
        fwd(&mut s);
        let bin = |f: f64| crate::dsp::spectrum::bin_index((f * dur).round() as i64, n);
        let idler = s[bin(2.0 * f1 - f2)].norm_sqr().min(s[bin(2.0 * f2 - f1)].norm_sqr());
        // odd multiples of 50 GHz carry cascaded products; -175 GHz carries nothing
        let floor = s[bin(snap_to_grid(-175.0, dur))].norm_sqr().max(1e-300);
        assert!(10.0 * (idler / floor).log10() >= 20.0);
    }

    fn snap_to_grid(f: f64, dur: f64) -> f64 {
        (f * dur).round() / dur
    }

    #[test]
    fn rejects_bad_input() {
        let f = gaussian(64, 3.0, 1e-3, 0.0);
        assert!(fiber_propagate(&f, &FiberParams::default(), StepControl::Fixed { step_km: 0.0 }).is_err());
        let bad = FiberParams { gamma_per_w_km: -1.0, ..Default::default() };
        assert!(fiber_propagate(&f, &bad, StepControl::default()).is_err());
        let huge = f.with_envelope(vec![Complex64::new(f64::NAN, 0.0); 64]).unwrap();
        assert!(matches!(
            fiber_propagate(&huge, &FiberParams::default(), StepControl::default()),
            Err(Error::NonFinite { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn linear_without_kerr(a_re in -2.0f64..2.0, a_im in -2.0f64..2.0, b in -2.0f64..2.0, b2 in -30.0f64..30.0) {
            let x = gaussian(512, 4.0, 1e-2, -30.0);
            let y = gaussian(512, 7.0, 3e-3, 40.0);
            let fib = fiber(3.0, 0.35, b2, 0.0);
            let a = Complex64::new(a_re, a_im);
            let combo: Vec<Complex64> = x.envelope().iter().zip(y.envelope()).map(|(u, v)| a * u + b * v).collect();
            let lhs = fiber_propagate(&x.with_envelope(combo).unwrap(), &fib, StepControl::default()).unwrap();
            let px = fiber_propagate(&x, &fib, StepControl::default()).unwrap();
            let py = fiber_propagate(&y, &fib, StepControl::default()).unwrap();
            for ((l, u), v) in lhs.envelope().iter().zip(px.envelope()).zip(py.envelope()) {
                prop_assert!((l - (a * u + b * v)).norm() < 1e-9 * 0.3);
            }
        }

        #[test]
        fn kerr_preserves_modulus(p in 1e-4f64..1.0, len in 0.1f64..20.0) {
            let x = gaussian(256, 5.0, p, 0.0);
            let out = fiber_propagate(&x, &fiber(len, 0.0, 0.0, 1.3), StepControl::default()).unwrap();
            for (a, b) in x.envelope().iter().zip(out.envelope()) {
                prop_assert!((a.norm() - b.norm()).abs() <= 1e-15 * a.norm());
            }
        }
    }
}
