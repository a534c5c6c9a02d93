use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::field::OpticalField;
use crate::dsp::waveform::SampledWaveform;
use crate::error::{Error, Result};

/// Elementary charge in C.
pub const ELECTRON_CHARGE: f64 = 1.602_176_634e-19;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhotodetectorSpec {
    pub responsivity_a_per_w: f64,
    pub thermal_noise_a_per_sqrt_hz: f64,
    pub shot_noise_enabled: bool,
}

impl Default for PhotodetectorSpec {
    fn default() -> Self {
        Self {
            responsivity_a_per_w: 0.8,
            thermal_noise_a_per_sqrt_hz: 20e-12,
            shot_noise_enabled: true,
        }
    }
}

impl PhotodetectorSpec {
    pub fn noiseless(responsivity_a_per_w: f64) -> Self {
        Self {
            responsivity_a_per_w,
            thermal_noise_a_per_sqrt_hz: 0.0,
            shot_noise_enabled: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.responsivity_a_per_w > 0.0 && self.responsivity_a_per_w.is_finite()) {
            return Err(Error::invalid("responsivity", format!("{}", self.responsivity_a_per_w)));
        }
        if !(self.thermal_noise_a_per_sqrt_hz >= 0.0 && self.thermal_noise_a_per_sqrt_hz.is_finite()) {
            return Err(Error::invalid("thermal noise", format!("{}", self.thermal_noise_a_per_sqrt_hz)));
        }
        Ok(())
    }
}

/// Square-law detection `i = R |A|^2` in A, plus thermal and optional shot noise over the
/// simulation bandwidth (half the sample rate).
pub fn photodetect(field: &OpticalField, spec: &PhotodetectorSpec, seed: u64) -> Result<SampledWaveform> {
    spec.validate()?;
    if field.channel_plan().len() != 1 {
        return Err(Error::invalid(
            "photodetector input",
            format!("{} channels; demultiplex first", field.channel_plan().len()),
        ));
    }
    let bandwidth_hz = field.sample_rate_ghz() * 1e9 / 2.0;
    let thermal_sigma = spec.thermal_noise_a_per_sqrt_hz * bandwidth_hz.sqrt();
    let shot_scale = 2.0 * ELECTRON_CHARGE * bandwidth_hz;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noisy = thermal_sigma > 0.0 || spec.shot_noise_enabled;
    let current: Vec<f64> = field
        .envelope()
        .iter()
        .map(|a| {
            let i = spec.responsivity_a_per_w * a.norm_sqr();
            if !noisy {
                return i;
            }
            let mut var = thermal_sigma * thermal_sigma;
            if spec.shot_noise_enabled {
                var += shot_scale * i;
            }
            let z: f64 = StandardNormal.sample(&mut rng);
            i + var.sqrt() * z
        })
        .collect();
    SampledWaveform::from_real(&current, field.sample_rate_ghz(), 0.0)
}
