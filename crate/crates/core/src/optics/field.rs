use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp::waveform::{read_interchange, write_interchange, OPTICAL_MAGIC};
use crate::error::{Error, Result};

/// One WDM slot: channel index and its optical frequency offset from the center wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSlot {
    pub index: usize,
    pub offset_ghz: f64,
}

/// Slowly varying optical envelope in sqrt(W).
///
/// Envelope convention `E = Re{A exp(-i w0 t)}`: content at physical offset `+df` appears as
/// `exp(-i 2 pi df t)` in `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalField {
    envelope: Vec<Complex64>,
    sample_rate_ghz: f64,
    center_wavelength_nm: f64,
    channel_plan: Vec<ChannelSlot>,
}

impl OpticalField {
    pub fn new(
        envelope: Vec<Complex64>,
        sample_rate_ghz: f64,
        center_wavelength_nm: f64,
        channel_plan: Vec<ChannelSlot>,
    ) -> Result<Self> {
        if envelope.is_empty() {
            return Err(Error::invalid("optical field", "no samples"));
        }
        if !(sample_rate_ghz.is_finite() && sample_rate_ghz > 0.0) {
            return Err(Error::invalid("optical field", format!("sample rate {sample_rate_ghz}")));
        }
        if !(center_wavelength_nm.is_finite() && center_wavelength_nm > 0.0) {
            return Err(Error::invalid("optical field", format!("wavelength {center_wavelength_nm}")));
        }
        if let Some(s) = channel_plan
            .iter()
            .find(|s| s.offset_ghz.abs() >= sample_rate_ghz / 2.0)
        {
            return Err(Error::invalid(
                "optical field",
                format!("channel {} at {} GHz outside the sampled band", s.index, s.offset_ghz),
            ));
        }
        Ok(Self {
            envelope,
            sample_rate_ghz,
            center_wavelength_nm,
            channel_plan,
        })
    }

    /// Single channel at offset 0.
    pub fn single(envelope: Vec<Complex64>, sample_rate_ghz: f64, center_wavelength_nm: f64) -> Result<Self> {
        Self::new(
            envelope,
            sample_rate_ghz,
            center_wavelength_nm,
            vec![ChannelSlot {
                index: 0,
                offset_ghz: 0.0,
            }],
        )
    }

    pub fn envelope(&self) -> &[Complex64] {
        &self.envelope
    }

    pub fn into_envelope(self) -> Vec<Complex64> {
        self.envelope
    }

    pub fn len(&self) -> usize {
        self.envelope.len()
    }

    pub fn is_empty(&self) -> bool {
        self.envelope.is_empty()
    }

    pub fn sample_rate_ghz(&self) -> f64 {
        self.sample_rate_ghz
    }

    pub fn center_wavelength_nm(&self) -> f64 {
        self.center_wavelength_nm
    }

    pub fn channel_plan(&self) -> &[ChannelSlot] {
        &self.channel_plan
    }

    pub fn duration_ns(&self) -> f64 {
        self.len() as f64 / self.sample_rate_ghz
    }

    /// Instantaneous power `|A|^2` in W.
    pub fn power_w(&self) -> Vec<f64> {
        self.envelope.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn mean_power_w(&self) -> f64 {
        crate::dsp::spectrum::mean_power(&self.envelope)
    }

    /// `sum |A|^2 dt` in W ns.
    pub fn energy(&self) -> f64 {
        crate::dsp::spectrum::energy(&self.envelope) / self.sample_rate_ghz
    }

    pub fn with_envelope(&self, envelope: Vec<Complex64>) -> Result<Self> {
        Self::new(
            envelope,
            self.sample_rate_ghz,
            self.center_wavelength_nm,
            self.channel_plan.clone(),
        )
    }

    /// `ROFO` interchange dump; the header carries the center wavelength (nm) and the channel
    /// plan is not stored.
    pub fn write_rofo<W: Write>(&self, w: W) -> Result<()> {
        write_interchange(
            w,
            *OPTICAL_MAGIC,
            self.sample_rate_ghz * 1e9,
            self.center_wavelength_nm,
            &self.envelope,
        )
    }

    pub fn read_rofo<R: Read>(r: R) -> Result<Self> {
        let (rate_hz, wavelength, envelope) = read_interchange(r, *OPTICAL_MAGIC)?;
        Self::single(envelope, rate_hz / 1e9, wavelength)
    }
}

/// dBm to W.
pub fn dbm_to_w(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

pub fn w_to_dbm(w: f64) -> f64 {
    10.0 * (w * 1e3).log10()
}
