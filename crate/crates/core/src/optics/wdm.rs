use std::f64::consts::LN_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{ChannelSlot, OpticalField};
use crate::dsp::spectrum::{bin_freq, fft, ifft, mix, resample, snap_to_frame};
use crate::error::{Error, Result};

/// Highest composite sample rate the multiplexer will build.
pub const MAX_COMPOSITE_RATE_GHZ: f64 = 20_000.0;

/// Symmetric channel offsets `(k - (n-1)/2) * spacing`.
pub fn channel_offsets(n: usize, spacing_ghz: f64) -> Vec<f64> {
    let centre = (n as f64 - 1.0) / 2.0;
    (0..n).map(|k| (k as f64 - centre) * spacing_ghz).collect()
}

/// Smallest `base * 2^k` not below `min_rate`.
pub fn power_of_two_rate(base_ghz: f64, min_rate_ghz: f64) -> f64 {
    let mut rate = base_ghz;
    while rate < min_rate_ghz {
        rate *= 2.0;
    }
    rate
}

/// Composite rate that keeps `content_half_width_ghz` around every channel, plus one spare slot
/// beyond each outer channel for intermodulation products, free of aliasing.
pub fn composite_rate(base_ghz: f64, n: usize, spacing_ghz: f64, content_half_width_ghz: f64) -> f64 {
    let outer = channel_offsets(n, spacing_ghz)
        .into_iter()
        .fold(0.0f64, |m, o| m.max(o.abs()));
    let spare = if n > 1 { spacing_ghz } else { 0.0 };
    power_of_two_rate(base_ghz, 2.0 * (outer + spare + content_half_width_ghz))
}

/// Shift channel `k` to its slot and sum. Channels must share rate, length and wavelength and
/// hold a single channel at offset 0. If the rate cannot give every channel one spacing of
/// bandwidth the channels are upsampled by powers of two first.
pub fn wdm_mux(channels: &[OpticalField], spacing_ghz: f64) -> Result<OpticalField> {
    let first = channels
        .first()
        .ok_or_else(|| Error::invalid("WDM mux", "no channels"))?;
    if !(spacing_ghz > 0.0 && spacing_ghz.is_finite()) {
        return Err(Error::invalid("channel spacing", format!("{spacing_ghz} GHz")));
    }
    for c in channels {
        if c.len() != first.len()
            || c.sample_rate_ghz() != first.sample_rate_ghz()
            || c.center_wavelength_nm() != first.center_wavelength_nm()
        {
            return Err(Error::invalid("WDM mux", "channels differ in rate, length or wavelength"));
        }
        if c.channel_plan().len() != 1 || c.channel_plan()[0].offset_ghz != 0.0 {
            return Err(Error::invalid("WDM mux", "inputs must be single channels at offset 0"));
        }
    }
    let n = channels.len();
    let rate = power_of_two_rate(first.sample_rate_ghz(), n as f64 * spacing_ghz);
    if rate > MAX_COMPOSITE_RATE_GHZ {
        return Err(Error::Config(format!(
            "{n} channels at {spacing_ghz} GHz need {rate} GHz sampling, above {MAX_COMPOSITE_RATE_GHZ} GHz"
        )));
    }
    let len = (first.duration_ns() * rate).round() as usize;
    let duration = first.duration_ns();
    let mut composite = vec![Complex64::default(); len];
    let mut plan = Vec::with_capacity(n);
    for (k, (ch, offset)) in channels.iter().zip(channel_offsets(n, spacing_ghz)).enumerate() {
        let offset = snap_to_frame(offset, duration);
        let mut x = resample(ch.envelope(), len);
        mix(&mut x, -offset, rate);
        composite.iter_mut().zip(&x).for_each(|(c, v)| *c += v);
        plan.push(ChannelSlot {
            index: k,
            offset_ghz: offset,
        });
    }
    OpticalField::new(composite, rate, first.center_wavelength_nm(), plan)
}

/// Channel-select filter: super-Gaussian power transfer `exp(-ln2 (2f/B)^(2n))`, zero phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemuxFilter {
    pub order: u32,
    pub bandwidth_ghz: f64,
}

impl DemuxFilter {
    /// Second order, 3 dB bandwidth `0.75 * spacing`.
    pub fn for_spacing(spacing_ghz: f64) -> Self {
        Self {
            order: 2,
            bandwidth_ghz: 0.75 * spacing_ghz,
        }
    }

    pub fn power_transfer(&self, f_ghz: f64) -> f64 {
        (-LN_2 * (2.0 * f_ghz / self.bandwidth_ghz).powi(2 * self.order as i32)).exp()
    }
}

/// Bring channel `channel_index` to offset 0 and filter it out.
pub fn wdm_demux(composite: &OpticalField, channel_index: usize, filter: &DemuxFilter) -> Result<OpticalField> {
    let slot = composite
        .channel_plan()
        .iter()
        .find(|s| s.index == channel_index)
        .ok_or(Error::UnknownChannel {
            index: channel_index,
            count: composite.channel_plan().len(),
        })?;
    if filter.order == 0 || !(filter.bandwidth_ghz > 0.0) {
        return Err(Error::invalid("demux filter", format!("{filter:?}")));
    }
    let rate = composite.sample_rate_ghz();
    let mut x = composite.envelope().to_vec();
    mix(&mut x, slot.offset_ghz, rate);
    fft(&mut x);
    let n = x.len();
    for (k, v) in x.iter_mut().enumerate() {
        *v *= filter.power_transfer(bin_freq(k, n, rate)).sqrt();
    }
    ifft(&mut x);
    OpticalField::new(
        x,
        rate,
        composite.center_wavelength_nm(),
        vec![ChannelSlot {
            index: channel_index,
            offset_ghz: 0.0,
        }],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::spectrum::energy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    /// Band-limited random field occupying `|f| < width` GHz.
    fn channel(n: usize, rate: f64, width: f64, seed: u64) -> OpticalField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = Normal::new(0.0, 1.0).unwrap();
        let mut spec: Vec<Complex64> = (0..n)
            .map(|k| {
                if bin_freq(k, n, rate).abs() < width {
                    Complex64::new(d.sample(&mut rng), d.sample(&mut rng))
                } else {
                    Complex64::default()
                }
            })
            .collect();
        ifft(&mut spec);
        let p = energy(&spec) / n as f64;
        spec.iter_mut().for_each(|v| *v *= (1e-3 / p).sqrt());
        OpticalField::single(spec, rate, 1310.0).unwrap()
    }

    #[test]
    fn offsets_are_symmetric() {
        assert_eq!(channel_offsets(4, 200.0), vec![-300.0, -100.0, 100.0, 300.0]);
        assert_eq!(channel_offsets(1, 200.0), vec![0.0]);
        assert_eq!(channel_offsets(3, 200.0), vec![-200.0, 0.0, 200.0]);
    }

    #[test]
    fn composite_rates() {
        assert_eq!(composite_rate(2.5, 1, 200.0, 88.5), 320.0);
        assert_eq!(composite_rate(2.5, 2, 200.0, 88.5), 1280.0);
        assert_eq!(composite_rate(2.5, 2, 200.0, 20.0), 640.0);
        assert_eq!(composite_rate(2.5, 4, 200.0, 88.5), 1280.0);
    }

    #[test]
    fn single_channel_is_identity() {
        let c = channel(512, 320.0, 20.0, 1);
        let m = wdm_mux(std::slice::from_ref(&c), 200.0).unwrap();
        assert_eq!(m.envelope(), c.envelope());
        assert_eq!(m.channel_plan()[0].offset_ghz, 0.0);
    }

    #[test]
    fn four_channels_and_energy() {
        let chans: Vec<_> = (0..4).map(|k| channel(2048, 1280.0, 20.0, k)).collect();
        let m = wdm_mux(&chans, 200.0).unwrap();
        let offs: Vec<f64> = m.channel_plan().iter().map(|s| s.offset_ghz).collect();
        assert_eq!(offs, vec![-300.0, -100.0, 100.0, 300.0]);
        let sum: f64 = chans.iter().map(|c| c.energy()).sum();
        assert!((m.energy() - sum).abs() < 1e-9 * sum);
    }

    #[test]
    fn physical_offset_sign() {
        // channel 3 sits at +300 GHz: envelope rotates as exp(-i 2 pi 300 t)
        let dc = OpticalField::single(vec![Complex64::new(1.0, 0.0); 1280], 1280.0, 1310.0).unwrap();
        let m = wdm_mux(&[dc.clone(), dc.clone(), dc.clone(), dc], 200.0).unwrap();
        let mut x = m.envelope().to_vec();
        fft(&mut x);
        let n = x.len();
        assert!(x[crate::dsp::spectrum::bin_index(-300, n)].norm() > 0.99 * n as f64);
    }

    #[test]
    fn mux_upsamples_when_needed() {
        let chans: Vec<_> = (0..4).map(|k| channel(256, 80.0, 20.0, k)).collect();
        let m = wdm_mux(&chans, 200.0).unwrap();
        assert_eq!(m.sample_rate_ghz(), 1280.0);
        assert_eq!(m.len(), 256 * 16);
    }

    #[test]
    fn demux_recovers_each_channel() {
        let chans: Vec<_> = (0..4).map(|k| channel(2048, 1280.0, 20.0, 10 + k)).collect();
        let m = wdm_mux(&chans, 200.0).unwrap();
        let filter = DemuxFilter::for_spacing(200.0);
        for (k, c) in chans.iter().enumerate() {
            let d = wdm_demux(&m, k, &filter).unwrap();
            let err: f64 = d
                .envelope()
                .iter()
                .zip(c.envelope())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum();
            // in-band droop of the filter is < 1e-3 at 20 GHz
            assert!(err / energy(c.envelope()) < 1e-5, "channel {k}");
        }
    }

    #[test]
    fn neighbour_isolation() {
        let chans = vec![channel(2048, 1280.0, 20.0, 3); 3];
        let mut m = wdm_mux(&chans, 200.0).unwrap();
        // blank the middle slot by rebuilding with only the outer channels present
        let full = m.clone();
        let filter = DemuxFilter::for_spacing(200.0);
        let occupied = wdm_demux(&full, 0, &filter).unwrap().mean_power_w();
        let mut x = full.envelope().to_vec();
        let mut centre = resample(chans[1].envelope(), x.len());
        mix(&mut centre, -full.channel_plan()[1].offset_ghz, full.sample_rate_ghz());
        x.iter_mut().zip(&centre).for_each(|(a, b)| *a -= b);
        m = full.with_envelope(x).unwrap();
        let leak = wdm_demux(&m, 1, &filter).unwrap().mean_power_w();
        assert!(10.0 * (occupied / leak).log10() >= 40.0);
    }

    #[test]
    fn unknown_channel() {
        let m = wdm_mux(&[channel(64, 320.0, 10.0, 0)], 200.0).unwrap();
        assert!(matches!(
            wdm_demux(&m, 3, &DemuxFilter::for_spacing(200.0)),
            Err(Error::UnknownChannel { index: 3, count: 1 })
        ));
    }
}
