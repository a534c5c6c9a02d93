//! End-to-end link simulation.
//!
//! Frames are periodic, carriers sit on the frame grid, and synchronization is ideal: the
//! receiver knows the delay and only a single complex gain is fitted before the EVM.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::scenario::{DigitalTransport, FronthaulScenario};
use super::transport::{ook_ber, ook_flip_bits};
use crate::dsp::evm::{measure_evm, EvmReport};
use crate::dsp::mixer::{downconvert, upconvert};
use crate::dsp::pulse::{matched_filter, pulse_shape_with, RrcFilter};
use crate::dsp::qam::{qam_modulate, random_bits, SymbolFrame};
use crate::dsp::sampling::{bandpass_sample_quantize, dac_reconstruct, QuantizerSpec};
use crate::dsp::spectrum::{delay, resample, snap_to_frame};
use crate::dsp::waveform::SampledWaveform;
use crate::error::Result;
use crate::exec::{self, Execution};
use crate::optics::wdm::composite_rate;
use crate::optics::{
    electrical_bandpass, eo_convert, fiber_propagate, photodetect, wdm_demux, wdm_mux, DemuxFilter,
};
use crate::powermodel::LinkKind;

/// Random stream family per component, combined with the channel index.
const PAYLOAD_STREAM: u64 = 1 << 32;
const DETECTOR_STREAM: u64 = 2 << 32;
const TRANSPORT_STREAM: u64 = 3 << 32;

pub(crate) fn channel_rng(seed: u64, family: u64, channel: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(family | channel as u64);
    rng
}

/// Per-channel outcome of one link run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelResult {
    pub channel: usize,
    pub evm_percent: f64,
    pub symbols_used: usize,
    pub equalizer_gain: [f64; 2],
    /// D-RoF only.
    pub clip_fraction: Option<f64>,
    /// D-RoF OOK transport only.
    pub bit_error_rate: Option<f64>,
}

impl ChannelResult {
    fn new(channel: usize, r: &EvmReport) -> Self {
        Self {
            channel,
            evm_percent: r.evm_percent_rms,
            symbols_used: r.symbols_used,
            equalizer_gain: [r.equalizer_gain.re, r.equalizer_gain.im],
            clip_fraction: None,
            bit_error_rate: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkReport {
    pub kind: LinkKind,
    pub wdm_channels: usize,
    pub laser_power_dbm: f64,
    pub scenario_hash: String,
    pub channels: Vec<ChannelResult>,
}

impl LinkReport {
    pub fn worst_evm(&self) -> f64 {
        self.channels.iter().map(|c| c.evm_percent).fold(0.0, f64::max)
    }

    /// Max minus min EVM across channels.
    pub fn evm_spread(&self) -> f64 {
        let min = self.channels.iter().map(|c| c.evm_percent).fold(f64::INFINITY, f64::min);
        self.worst_evm() - min
    }
}

struct Transmitted {
    symbols: SymbolFrame,
    passband: SampledWaveform,
}

fn transmit(s: &FronthaulScenario, channel: usize, filter: &RrcFilter, f_c: f64) -> Result<Transmitted> {
    let mut rng = channel_rng(s.seeds.payload, PAYLOAD_STREAM, channel);
    let bits = random_bits(&mut rng, s.payload_symbols * s.modulation.bits_per_symbol() as usize);
    let symbols = qam_modulate(&bits, s.modulation, s.symbol_rate_gbaud()).map_err(|e| e.in_stage("qam", channel))?;
    let bb = pulse_shape_with(&symbols, filter).map_err(|e| e.in_stage("pulse shaping", channel))?;
    let passband = upconvert(&bb, f_c).map_err(|e| e.in_stage("upconversion", channel))?;
    Ok(Transmitted { symbols, passband })
}

fn receive(
    pass: &SampledWaveform,
    tx: &SymbolFrame,
    filter: &RrcFilter,
    f_c: f64,
    channel: usize,
    advance_ns: f64,
) -> Result<EvmReport> {
    let bb_rate = tx.symbol_rate_gbaud * filter.sps() as f64;
    let bb = downconvert(pass, f_c, bb_rate).map_err(|e| e.in_stage("downconversion", channel))?;
    let bb = if advance_ns != 0.0 {
        let mut x = bb.samples().to_vec();
        delay(&mut x, -advance_ns, bb_rate);
        bb.with_samples(x)?
    } else {
        bb
    };
    let rx = matched_filter(&bb, filter, tx).map_err(|e| e.in_stage("matched filter", channel))?;
    measure_evm(tx, &rx).map_err(|e| e.in_stage("evm", channel))
}

/// Frame-grid carrier used for the RF band.
pub fn link_carrier_ghz(s: &FronthaulScenario) -> f64 {
    let duration = s.payload_symbols as f64 / s.symbol_rate_gbaud();
    snap_to_frame(s.band.carrier_freq_ghz(), duration)
}

/// Composite optical sample rate for the scenario.
pub fn optical_rate_ghz(s: &FronthaulScenario) -> f64 {
    // keep modulator harmonics up to the third order alias-free around every channel
    composite_rate(s.symbol_rate_gbaud(), s.wdm_channels, s.spacing_ghz, 3.0 * s.band.f_max_ghz())
}

pub fn run_link(s: &FronthaulScenario) -> Result<LinkReport> {
    run_link_with(Execution::default(), s)
}

pub fn run_link_with(exec: Execution, s: &FronthaulScenario) -> Result<LinkReport> {
    s.validate()?;
    let filter = RrcFilter::periodic(s.link.rolloff, s.link.oversampling)?;
    let f_c = link_carrier_ghz(s);
    let channels = match s.link_kind {
        LinkKind::Arof => run_arof(exec, s, &filter, f_c)?,
        LinkKind::Drof => run_drof(exec, s, &filter, f_c)?,
    };
    Ok(LinkReport {
        kind: s.link_kind,
        wdm_channels: s.wdm_channels,
        laser_power_dbm: s.modulator.laser_power_dbm,
        scenario_hash: s.hash(),
        channels,
    })
}

fn run_arof(exec: Execution, s: &FronthaulScenario, filter: &RrcFilter, f_c: f64) -> Result<Vec<ChannelResult>> {
    let rate = optical_rate_ghz(s);
    let n = s.wdm_channels;
    let sent: Vec<(SymbolFrame, crate::optics::OpticalField)> = exec::map_range(exec, n, |k| {
        let tx = transmit(s, k, filter, f_c)?;
        let len = (tx.passband.duration_ns() * rate).round() as usize;
        let drive: Vec<Complex64> = resample(tx.passband.samples(), len)
            .into_iter()
            .map(|v| Complex64::new(v.re, 0.0))
            .collect();
        let drive = SampledWaveform::new(drive, rate, f_c)?;
        let field = eo_convert(&drive, &s.modulator).map_err(|e| e.in_stage("e/o conversion", k))?;
        Ok((tx.symbols, field))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let (frames, fields): (Vec<_>, Vec<_>) = sent.into_iter().unzip();

    let composite = wdm_mux(&fields, s.spacing_ghz).map_err(|e| e.in_stage("wdm mux", 0))?;
    drop(fields);
    let received = fiber_propagate(&composite, &s.fiber, s.link.step).map_err(|e| e.in_stage("fiber", 0))?;
    drop(composite);

    let demux = DemuxFilter {
        order: s.link.demux_order,
        bandwidth_ghz: s.link.demux_bandwidth_ghz.unwrap_or(0.75 * s.spacing_ghz),
    };
    let wavelength = received.center_wavelength_nm();
    exec::map(exec, received.channel_plan(), |k, slot| {
        let ch = wdm_demux(&received, slot.index, &demux).map_err(|e| e.in_stage("wdm demux", k))?;
        let seed: u64 = channel_rng(s.seeds.detector, DETECTOR_STREAM, k).random();
        let current = photodetect(&ch, &s.detector, seed).map_err(|e| e.in_stage("photodetector", k))?;
        drop(ch);
        let rf = electrical_bandpass(&current, f_c, s.link.ebpf_bandwidth_ghz).map_err(|e| e.in_stage("ebpf", k))?;
        let advance = if s.link.compensate_walkoff {
            s.fiber.group_delay_ns(wavelength, slot.offset_ghz)
        } else {
            0.0
        };
        let evm = receive(&rf, &frames[k], filter, f_c, k, advance)?;
        Ok(ChannelResult::new(k, &evm))
    })
    .into_iter()
    .collect()
}

fn run_drof(exec: Execution, s: &FronthaulScenario, filter: &RrcFilter, f_c: f64) -> Result<Vec<ChannelResult>> {
    let ber = match s.link.transport {
        DigitalTransport::Ideal => None,
        DigitalTransport::Ook => Some(ook_ber(s)),
    };
    exec::map_range(exec, s.wdm_channels, |k| {
        let tx = transmit(s, k, filter, f_c)?;
        let q = QuantizerSpec::new(s.coding.resolution_bits, s.link.full_scale_rms * tx.passband.rms_real())
            .map_err(|e| e.in_stage("quantizer", k))?;
        let mut stream = bandpass_sample_quantize(&tx.passband, &s.band, &q).map_err(|e| e.in_stage("adc", k))?;
        if let Some(p) = ber {
            let mut rng = channel_rng(s.seeds.transport, TRANSPORT_STREAM, k);
            ook_flip_bits(&mut stream, p, &mut rng);
        }
        let rebuilt = dac_reconstruct(&stream, tx.passband.sample_rate_ghz()).map_err(|e| e.in_stage("dac", k))?;
        let evm = receive(&rebuilt, &tx.symbols, filter, f_c, k, 0.0)?;
        let mut r = ChannelResult::new(k, &evm);
        r.clip_fraction = Some(stream.clip_fraction);
        r.bit_error_rate = ber;
        Ok(r)
    })
    .into_iter()
    .collect()
}
