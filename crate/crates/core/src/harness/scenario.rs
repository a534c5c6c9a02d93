use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dimensioning::{CpriCoding, MimoGeometry, ModulationScheme, RfBandPlan};
use crate::error::{Error, Result};
use crate::optics::{FiberParams, ModulatorSpec, PhotodetectorSpec, StepControl};
use crate::powermodel::LinkKind;

/// Seeds of the independent random components. Each channel draws from its own stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Seeds {
    pub payload: u64,
    pub detector: u64,
    pub transport: u64,
}

impl Default for Seeds {
    fn default() -> Self {
        Self::all(1)
    }
}

impl Seeds {
    pub fn all(seed: u64) -> Self {
        Self {
            payload: seed,
            detector: seed,
            transport: seed,
        }
    }
}

/// How the D-RoF sample stream crosses the fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DigitalTransport {
    /// Error-free digital pipe; only quantization impairs the signal.
    Ideal,
    /// On-off keyed line with a thermal/shot-noise-limited bit error rate and no nonlinearity.
    Ook,
}

/// Signal-chain settings of the link simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkSettings {
    pub rolloff: f64,
    /// Baseband samples per symbol.
    pub oversampling: usize,
    /// Flat passband of the receiver bandpass filter.
    pub ebpf_bandwidth_ghz: f64,
    /// 3 dB bandwidth of the demux filter; `0.75 * spacing` when absent.
    pub demux_bandwidth_ghz: Option<f64>,
    pub demux_order: u32,
    pub step: StepControl,
    /// Quantizer full scale as a multiple of the passband RMS.
    pub full_scale_rms: f64,
    pub transport: DigitalTransport,
    /// Undo the per-channel group delay before matched filtering.
    pub compensate_walkoff: bool,
}

impl Default for LinkSettings {
    fn default() -> Self {
        Self {
            rolloff: 0.2,
            oversampling: 4,
            ebpf_bandwidth_ghz: 3.5,
            demux_bandwidth_ghz: None,
            demux_order: 2,
            step: StepControl::default(),
            full_scale_rms: 4.0,
            transport: DigitalTransport::Ideal,
            compensate_walkoff: true,
        }
    }
}

/// Everything needed to run one link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FronthaulScenario {
    pub link_kind: LinkKind,
    pub band: RfBandPlan,
    pub geom: MimoGeometry,
    #[serde(rename = "mod")]
    pub modulation: ModulationScheme,
    pub coding: CpriCoding,
    #[serde(default)]
    pub fiber: FiberParams,
    #[serde(default)]
    pub modulator: ModulatorSpec,
    #[serde(default)]
    pub detector: PhotodetectorSpec,
    pub wdm_channels: usize,
    pub spacing_ghz: f64,
    pub payload_symbols: usize,
    #[serde(default)]
    pub seeds: Seeds,
    #[serde(default)]
    pub link: LinkSettings,
}

/// Fewest symbols per channel for a meaningful EVM.
pub const MIN_PAYLOAD_SYMBOLS: usize = 1000;

impl Default for FronthaulScenario {
    /// 20 Gbps per wavelength: 256-QAM at 2.5 Gbaud in 3 GHz around 28 GHz, 15 km, 4 x 200 GHz.
    fn default() -> Self {
        Self {
            link_kind: LinkKind::Arof,
            band: RfBandPlan::new(28.0, 1.5).expect("valid band"),
            geom: MimoGeometry::new(16, 16, 3).expect("valid geometry"),
            modulation: ModulationScheme::qam256(),
            coding: CpriCoding::cpri_default(),
            fiber: FiberParams::default(),
            modulator: ModulatorSpec::default(),
            detector: PhotodetectorSpec::default(),
            wdm_channels: 4,
            spacing_ghz: 200.0,
            payload_symbols: 1 << 14,
            seeds: Seeds::default(),
            link: LinkSettings::default(),
        }
    }
}

impl FronthaulScenario {
    pub fn validate(&self) -> Result<()> {
        if self.wdm_channels == 0 {
            return Err(Error::invalid("wdm_channels", "at least one channel required"));
        }
        if self.payload_symbols < MIN_PAYLOAD_SYMBOLS {
            return Err(Error::invalid(
                "payload_symbols",
                format!("{} < {MIN_PAYLOAD_SYMBOLS}", self.payload_symbols),
            ));
        }
        if !(self.spacing_ghz > 0.0 && self.spacing_ghz.is_finite()) {
            return Err(Error::invalid("spacing_ghz", format!("{}", self.spacing_ghz)));
        }
        if !(0.0..=1.0).contains(&self.link.rolloff) {
            return Err(Error::invalid("rolloff", format!("{}", self.link.rolloff)));
        }
        if self.link.oversampling < 2 {
            return Err(Error::invalid("oversampling", format!("{}", self.link.oversampling)));
        }
        if !(self.link.full_scale_rms > 0.0) {
            return Err(Error::invalid("full_scale_rms", format!("{}", self.link.full_scale_rms)));
        }
        self.fiber.validate()?;
        self.modulator.validate()?;
        self.detector.validate()
    }

    /// Symbol rate that fills the RF band: `2 W_bb / (1 + rolloff)`.
    pub fn symbol_rate_gbaud(&self) -> f64 {
        self.band.rf_bandwidth_ghz() / (1.0 + self.link.rolloff)
    }

    pub fn bit_rate_gbps(&self) -> f64 {
        self.symbol_rate_gbaud() * f64::from(self.modulation.bits_per_symbol())
    }

    /// Canonical JSON: fields in declaration order, shortest round-trip floats.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("scenario serializes")
    }

    /// Hex SHA-256 of [`Self::canonical_json`].
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}
