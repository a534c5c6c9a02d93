//! Closed-form A-RoF / D-RoF fronthaul dimensioning.
//!
//! An RF carrier at `f_c` with single-sided baseband bandwidth `W_bb` occupies
//! `[f_c - W_bb, f_c + W_bb]`. A-RoF carries that band once per wavelength; D-RoF bandpass-samples
//! it at the lowest alias-free rate, quantizes I and Q to `R` bits and adds CPRI control-word and
//! line-code overheads. Every function here is pure.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};

/// RF band occupied by one carrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBand")]
pub struct RfBandPlan {
    carrier_freq_ghz: f64,
    baseband_bw_ghz: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBand {
    carrier_freq_ghz: f64,
    baseband_bw_ghz: f64,
}

impl TryFrom<RawBand> for RfBandPlan {
    type Error = Error;
    fn try_from(raw: RawBand) -> Result<Self> {
        RfBandPlan::new(raw.carrier_freq_ghz, raw.baseband_bw_ghz)
    }
}

impl RfBandPlan {
    pub fn new(carrier_freq_ghz: f64, baseband_bw_ghz: f64) -> Result<Self> {
        if !(baseband_bw_ghz.is_finite() && baseband_bw_ghz > 0.0) {
            return Err(Error::invalid(
                "band",
                format!("baseband bandwidth must be positive, got {baseband_bw_ghz}"),
            ));
        }
        if !(carrier_freq_ghz.is_finite() && carrier_freq_ghz > baseband_bw_ghz) {
            return Err(Error::invalid(
                "band",
                format!(
                    "carrier {carrier_freq_ghz} GHz must exceed baseband bandwidth {baseband_bw_ghz} GHz"
                ),
            ));
        }
        Ok(Self {
            carrier_freq_ghz,
            baseband_bw_ghz,
        })
    }

    /// Band plan from a per-wavelength (double-sided) RF bandwidth.
    pub fn from_rf_bandwidth(carrier_freq_ghz: f64, rf_bw_ghz: f64) -> Result<Self> {
        Self::new(carrier_freq_ghz, rf_bw_ghz / 2.0)
    }

    pub fn carrier_freq_ghz(&self) -> f64 {
        self.carrier_freq_ghz
    }

    pub fn baseband_bw_ghz(&self) -> f64 {
        self.baseband_bw_ghz
    }

    /// Occupied RF bandwidth, `2 * W_bb`.
    pub fn rf_bandwidth_ghz(&self) -> f64 {
        2.0 * self.baseband_bw_ghz
    }

    pub fn f_max_ghz(&self) -> f64 {
        self.carrier_freq_ghz + self.baseband_bw_ghz
    }

    pub fn f_min_ghz(&self) -> f64 {
        self.carrier_freq_ghz - self.baseband_bw_ghz
    }
}

/// Antenna and sector counts. `rx_antennas` is descriptive only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGeometry")]
pub struct MimoGeometry {
    pub tx_antennas: u32,
    pub rx_antennas: u32,
    pub sectors: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    tx_antennas: u32,
    rx_antennas: u32,
    sectors: u32,
}

impl TryFrom<RawGeometry> for MimoGeometry {
    type Error = Error;
    fn try_from(raw: RawGeometry) -> Result<Self> {
        MimoGeometry::new(raw.tx_antennas, raw.rx_antennas, raw.sectors)
    }
}

impl MimoGeometry {
    pub fn new(tx_antennas: u32, rx_antennas: u32, sectors: u32) -> Result<Self> {
        if tx_antennas == 0 || rx_antennas == 0 || sectors == 0 {
            return Err(Error::invalid(
                "geometry",
                "antenna and sector counts must be at least 1",
            ));
        }
        Ok(Self {
            tx_antennas,
            rx_antennas,
            sectors,
        })
    }

    /// One wavelength per transmit antenna per sector.
    pub fn wavelengths(&self) -> u32 {
        self.tx_antennas * self.sectors
    }
}

/// CPRI digitisation parameters: quantizer resolution and the two rate overheads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCoding")]
pub struct CpriCoding {
    pub resolution_bits: u32,
    pub control_overhead: f64,
    pub line_code_rate: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoding {
    resolution_bits: u32,
    #[serde(deserialize_with = "de_ratio")]
    control_overhead: f64,
    #[serde(deserialize_with = "de_ratio")]
    line_code_rate: f64,
}

impl TryFrom<RawCoding> for CpriCoding {
    type Error = Error;
    fn try_from(raw: RawCoding) -> Result<Self> {
        CpriCoding::new(raw.resolution_bits, raw.control_overhead, raw.line_code_rate)
    }
}

impl CpriCoding {
    pub fn new(resolution_bits: u32, control_overhead: f64, line_code_rate: f64) -> Result<Self> {
        if resolution_bits == 0 {
            return Err(Error::invalid("coding", "resolution must be at least 1 bit"));
        }
        if !(control_overhead >= 1.0 && control_overhead.is_finite()) {
            return Err(Error::invalid(
                "coding",
                format!("control overhead must be >= 1, got {control_overhead}"),
            ));
        }
        if !(line_code_rate >= 1.0 && line_code_rate.is_finite()) {
            return Err(Error::invalid(
                "coding",
                format!("line code rate must be >= 1, got {line_code_rate}"),
            ));
        }
        Ok(Self {
            resolution_bits,
            control_overhead,
            line_code_rate,
        })
    }

    /// R = 15, C_w = 16/15, C = 10/8.
    pub fn cpri_default() -> Self {
        Self {
            resolution_bits: 15,
            control_overhead: 16.0 / 15.0,
            line_code_rate: 10.0 / 8.0,
        }
    }
}

/// Parse `"16/15"`, `"1.25"` or a bare number.
pub fn parse_ratio(text: &str) -> Result<f64> {
    let text = text.trim();
    let value = match text.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad_ratio(text))?;
            let den: f64 = den.trim().parse().map_err(|_| bad_ratio(text))?;
            if den == 0.0 {
                return Err(bad_ratio(text));
            }
            num / den
        }
        None => text.parse().map_err(|_| bad_ratio(text))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad_ratio(text))
    }
}

fn bad_ratio(text: &str) -> Error {
    Error::invalid("ratio", format!("cannot parse '{text}' as a number or a/b fraction"))
}

fn de_ratio<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Num {
        F(f64),
        I(i64),
        S(String),
    }
    match Num::deserialize(de)? {
        Num::F(v) => Ok(v),
        Num::I(v) => Ok(v as f64),
        Num::S(s) => parse_ratio(&s).map_err(serde::de::Error::custom),
    }
}

/// Square QAM with `S` constellation points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawModulation")]
pub struct ModulationScheme {
    constellation_points: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModulation {
    constellation_points: u32,
}

impl TryFrom<RawModulation> for ModulationScheme {
    type Error = Error;
    fn try_from(raw: RawModulation) -> Result<Self> {
        ModulationScheme::new(raw.constellation_points)
    }
}

impl ModulationScheme {
    pub fn new(constellation_points: u32) -> Result<Self> {
        match constellation_points {
            4 | 16 | 64 | 256 => Ok(Self {
                constellation_points,
            }),
            other => Err(Error::invalid(
                "modulation",
                format!("square QAM order must be one of 4, 16, 64, 256; got {other}"),
            )),
        }
    }

    pub fn qam256() -> Self {
        Self {
            constellation_points: 256,
        }
    }

    pub fn constellation_points(&self) -> u32 {
        self.constellation_points
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.constellation_points.trailing_zeros()
    }

    /// Amplitude levels per I or Q axis, `sqrt(S)`.
    pub fn levels_per_axis(&self) -> u32 {
        1 << (self.bits_per_symbol() / 2)
    }
}

/// Bounds of one Nyquist zone. The upper edge of zone 1 is unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingRange {
    pub low_ghz: f64,
    pub high_ghz: f64,
}

impl SamplingRange {
    pub fn contains(&self, fs_ghz: f64) -> bool {
        fs_ghz >= self.low_ghz && fs_ghz <= self.high_ghz
    }
}

impl Serialize for SamplingRange {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SamplingRange", 2)?;
        st.serialize_field("low_ghz", &self.low_ghz)?;
        if self.high_ghz.is_infinite() {
            st.serialize_field("high_ghz", "inf")?;
        } else {
            st.serialize_field("high_ghz", &self.high_ghz)?;
        }
        st.end()
    }
}

/// One dimensioning result. Serialized field names are the CSV column names.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensioningReport {
    #[serde(rename = "bw_per_wavelength_ghz")]
    pub bw_per_wavelength_ghz: f64,
    #[serde(rename = "fs_ghz")]
    pub min_sampling_rate_ghz: f64,
    #[serde(rename = "nz")]
    pub zone_index: u32,
    pub arof_bw_ghz: f64,
    pub arof_rate_gbps: f64,
    pub drof_bw_ghz: f64,
    pub drof_rate_gbps: f64,
    #[serde(rename = "ratio_b")]
    pub bandwidth_ratio: f64,
    #[serde(rename = "ratio_c")]
    pub rate_ratio: f64,
}

impl DimensioningReport {
    pub const CSV_HEADER: [&'static str; 9] = [
        "bw_per_wavelength_ghz",
        "fs_ghz",
        "nz",
        "arof_bw_ghz",
        "arof_rate_gbps",
        "drof_bw_ghz",
        "drof_rate_gbps",
        "ratio_b",
        "ratio_c",
    ];

    pub fn csv_fields(&self) -> [String; 9] {
        [
            fmt_num(self.bw_per_wavelength_ghz),
            fmt_num(self.min_sampling_rate_ghz),
            self.zone_index.to_string(),
            fmt_num(self.arof_bw_ghz),
            fmt_num(self.arof_rate_gbps),
            fmt_num(self.drof_bw_ghz),
            fmt_num(self.drof_rate_gbps),
            fmt_num(self.bandwidth_ratio),
            fmt_num(self.rate_ratio),
        ]
    }
}

/// Shortest round-trip decimal; `inf` for infinities.
pub fn fmt_num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

/// Highest Nyquist zone index, `floor(f_max / (f_max - f_min))`.
pub fn max_zone_index(band: &RfBandPlan) -> u32 {
    let ratio = band.f_max_ghz() / (band.f_max_ghz() - band.f_min_ghz());
    // exact-integer ratios must not drop a zone to rounding
    let n = (ratio * (1.0 + 1e-12)).floor();
    (n as u32).max(1)
}

/// Alias-free sampling rates for Nyquist zone `zone`.
pub fn sampling_rate_range(band: &RfBandPlan, zone: u32) -> Result<SamplingRange> {
    let max = max_zone_index(band);
    if zone == 0 || zone > max {
        return Err(Error::ZoneOutOfRange { zone, max });
    }
    let n = f64::from(zone);
    let low_ghz = 2.0 * band.f_max_ghz() / n;
    let high_ghz = if zone == 1 {
        f64::INFINITY
    } else {
        2.0 * band.f_min_ghz() / (n - 1.0)
    };
    Ok(SamplingRange { low_ghz, high_ghz })
}

/// Minimum bandpass sampling rate: lower edge of the highest valid zone.
pub fn min_sampling_rate(band: &RfBandPlan) -> f64 {
    2.0 * band.f_max_ghz() / f64::from(max_zone_index(band))
}

/// Aggregate A-RoF optical bandwidth, `2 W_bb N_t M`.
pub fn arof_bandwidth(band: &RfBandPlan, geom: &MimoGeometry) -> f64 {
    band.rf_bandwidth_ghz() * f64::from(geom.tx_antennas) * f64::from(geom.sectors)
}

/// A-RoF throughput, `2 W_bb N_t M log2(S)`.
pub fn arof_bit_rate(band: &RfBandPlan, geom: &MimoGeometry, modulation: &ModulationScheme) -> f64 {
    arof_bandwidth(band, geom) * f64::from(modulation.bits_per_symbol())
}

/// D-RoF line rate, `f_s R N_t M 2 C_w C`, with `f_s` the minimum bandpass rate.
pub fn drof_bit_rate(band: &RfBandPlan, geom: &MimoGeometry, coding: &CpriCoding) -> f64 {
    per_wavelength_line_rate(band, coding) * f64::from(geom.tx_antennas) * f64::from(geom.sectors)
}

/// D-RoF line rate of a single wavelength, `f_s R 2 C_w C`.
pub fn per_wavelength_line_rate(band: &RfBandPlan, coding: &CpriCoding) -> f64 {
    min_sampling_rate(band)
        * f64::from(coding.resolution_bits)
        * 2.0
        * coding.control_overhead
        * coding.line_code_rate
}

/// D-RoF optical bandwidth under rectangular pulses, `D / 2`.
pub fn drof_bandwidth(band: &RfBandPlan, geom: &MimoGeometry, coding: &CpriCoding) -> f64 {
    drof_bit_rate(band, geom, coding) / 2.0
}

/// `B = f_s R C_w C / (2 W_bb)`; independent of antenna and sector counts.
pub fn bandwidth_ratio(band: &RfBandPlan, coding: &CpriCoding) -> f64 {
    min_sampling_rate(band)
        * f64::from(coding.resolution_bits)
        * coding.control_overhead
        * coding.line_code_rate
        / (2.0 * band.baseband_bw_ghz())
}

/// Bit-rate ratio `f_s R C_w C / (W_bb log2 S)`.
pub fn rate_ratio(band: &RfBandPlan, coding: &CpriCoding, modulation: &ModulationScheme) -> f64 {
    min_sampling_rate(band)
        * f64::from(coding.resolution_bits)
        * coding.control_overhead
        * coding.line_code_rate
        / (band.baseband_bw_ghz() * f64::from(modulation.bits_per_symbol()))
}

pub fn dimension(
    band: &RfBandPlan,
    geom: &MimoGeometry,
    coding: &CpriCoding,
    modulation: &ModulationScheme,
) -> DimensioningReport {
    DimensioningReport {
        bw_per_wavelength_ghz: band.rf_bandwidth_ghz(),
        min_sampling_rate_ghz: min_sampling_rate(band),
        zone_index: max_zone_index(band),
        arof_bw_ghz: arof_bandwidth(band, geom),
        arof_rate_gbps: arof_bit_rate(band, geom, modulation),
        drof_bw_ghz: drof_bandwidth(band, geom, coding),
        drof_rate_gbps: drof_bit_rate(band, geom, coding),
        bandwidth_ratio: bandwidth_ratio(band, coding),
        rate_ratio: rate_ratio(band, coding, modulation),
    }
}

/// Dimension one report per per-wavelength RF bandwidth in `bw_points_ghz`, all on `carrier_ghz`.
pub fn dimension_sweep(
    carrier_ghz: f64,
    geom: &MimoGeometry,
    coding: &CpriCoding,
    modulation: &ModulationScheme,
    bw_points_ghz: &[f64],
) -> Result<Vec<DimensioningReport>> {
    dimension_sweep_with(Execution::default(), carrier_ghz, geom, coding, modulation, bw_points_ghz)
}

pub fn dimension_sweep_with(
    exec: Execution,
    carrier_ghz: f64,
    geom: &MimoGeometry,
    coding: &CpriCoding,
    modulation: &ModulationScheme,
    bw_points_ghz: &[f64],
) -> Result<Vec<DimensioningReport>> {
    if bw_points_ghz.is_empty() {
        return Err(Error::invalid("sweep", "no bandwidth points"));
    }
    exec::map(exec, bw_points_ghz, |i, &bw| {
        RfBandPlan::from_rf_bandwidth(carrier_ghz, bw)
            .map(|band| dimension(&band, geom, coding, modulation))
            .map_err(|e| e.at_point(i))
    })
    .into_iter()
    .collect()
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| {
                if i == count - 1 {
                    stop
                } else {
                    start + (stop - start) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}
