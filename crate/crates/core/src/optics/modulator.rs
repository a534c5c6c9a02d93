use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{dbm_to_w, OpticalField};
use crate::dsp::waveform::SampledWaveform;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModulatorKind {
    /// External Mach-Zehnder modulator, cosine field transfer.
    Mzm,
    /// Directly modulated laser with adiabatic chirp.
    Dml,
}

/// Reference impedance for the RF drive power setting.
pub const DRIVE_IMPEDANCE_OHM: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModulatorSpec {
    pub kind: ModulatorKind,
    pub v_pi: f64,
    pub bias_fraction: f64,
    /// RMS drive power into [`DRIVE_IMPEDANCE_OHM`], MZM only.
    pub rf_drive_dbm: f64,
    pub modulation_index: f64,
    pub chirp_factor: f64,
    pub laser_power_dbm: f64,
    pub wavelength_nm: f64,
}

impl Default for ModulatorSpec {
    fn default() -> Self {
        Self {
            kind: ModulatorKind::Mzm,
            v_pi: 5.0,
            bias_fraction: 0.5,
            rf_drive_dbm: 3.0,
            modulation_index: 0.5,
            chirp_factor: 0.0,
            laser_power_dbm: 4.0,
            wavelength_nm: 1310.0,
        }
    }
}

impl ModulatorSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &'static str, v: f64| Err(Error::invalid(what, format!("{v}")));
        if !(self.v_pi > 0.0 && self.v_pi.is_finite()) {
            return bad("v_pi", self.v_pi);
        }
        if !(self.bias_fraction > 0.0 && self.bias_fraction < 1.0) {
            return bad("bias_fraction", self.bias_fraction);
        }
        if !(self.modulation_index > 0.0 && self.modulation_index <= 1.0) {
            return bad("modulation_index", self.modulation_index);
        }
        if !self.chirp_factor.is_finite() {
            return bad("chirp_factor", self.chirp_factor);
        }
        if !self.laser_power_dbm.is_finite() || !self.rf_drive_dbm.is_finite() {
            return bad("power setting", self.laser_power_dbm);
        }
        if !(self.wavelength_nm > 0.0 && self.wavelength_nm.is_finite()) {
            return bad("wavelength_nm", self.wavelength_nm);
        }
        Ok(())
    }

    /// RMS drive voltage.
    pub fn drive_rms_volts(&self) -> f64 {
        (dbm_to_w(self.rf_drive_dbm) * DRIVE_IMPEDANCE_OHM).sqrt()
    }
}

/// Single-channel optical field from the real part of `rf`, at the same sample rate.
///
/// MZM: `A = sqrt(P0) cos(pi/2 (v/V_pi + b))`, with `v` scaled to the configured RMS drive.
/// DML: `A = sqrt(P0 (1 + m u)) exp(i a/2 ln(1 + m u))`, `u` scaled to unit peak.
pub fn eo_convert(rf: &SampledWaveform, spec: &ModulatorSpec) -> Result<OpticalField> {
    spec.validate()?;
    let p0 = dbm_to_w(spec.laser_power_dbm);
    let x: Vec<f64> = rf.samples().iter().map(|v| v.re).collect();
    let envelope = match spec.kind {
        ModulatorKind::Mzm => {
            let rms = rf.rms_real();
            let scale = if rms > 0.0 { spec.drive_rms_volts() / rms } else { 0.0 };
            let a0 = p0.sqrt();
            x.iter()
                .map(|&v| {
                    let arg = FRAC_PI_2 * (v * scale / spec.v_pi + spec.bias_fraction);
                    Complex64::new(a0 * arg.cos(), 0.0)
                })
                .collect()
        }
        ModulatorKind::Dml => {
            let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let scale = if peak > 0.0 { 1.0 / peak } else { 0.0 };
            let m = spec.modulation_index;
            let mut clipped = 0usize;
            let mut min_drive = f64::INFINITY;
            let env: Vec<Complex64> = x
                .iter()
                .map(|&v| {
                    let d = 1.0 + m * v * scale;
                    min_drive = min_drive.min(d);
                    if d <= 0.0 {
                        clipped += 1;
                        return Complex64::default();
                    }
                    Complex64::from_polar((p0 * d).sqrt(), spec.chirp_factor / 2.0 * d.ln())
                })
                .collect();
            if clipped > 0 {
                return Err(Error::Clipping {
                    samples: clipped,
                    min_drive,
                });
            }
            env
        }
    };
    OpticalField::single(envelope, rf.sample_rate_ghz(), spec.wavelength_nm)
}
