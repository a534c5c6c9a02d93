//! CU/RRH power consumption of the A-RoF and D-RoF fronthaul chains.
//!
//! Fixed per-site terms (climate control, supplies, signal-processing bases) do not scale with the
//! antenna count. E/O, O/E, converters and per-antenna signal processing scale with the number of
//! wavelengths `N_t * M`. ADC, DAC and the digital processing increment exist only in D-RoF.

use serde::{Deserialize, Serialize};

use crate::dimensioning::MimoGeometry;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};

/// Shipped coefficients. These are configuration defaults chosen to reproduce the A-RoF/D-RoF
/// trend, not measured wattages.
pub const DEFAULT_PARAMS_TOML: &str = include_str!("../data/power_defaults.toml");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerParams {
    pub climate_control: f64,
    pub cu_supply: f64,
    pub cu_signal_processing_base: f64,
    pub cu_signal_processing_per_antenna: f64,
    pub eo_per_wavelength: f64,
    pub oe_per_wavelength: f64,
    pub rrh_supply: f64,
    pub rrh_signal_processing_base: f64,
    pub rrh_signal_processing_per_antenna: f64,
    /// D-RoF only: extra per-wavelength digital processing (framing, serdes).
    pub digital_sp_increment: f64,
    /// D-RoF only.
    pub adc_per_converter: f64,
    /// D-RoF only.
    pub dac_per_converter: f64,
}

impl PowerParams {
    pub fn shipped_default() -> Self {
        Self::from_toml(DEFAULT_PARAMS_TOML).expect("shipped power defaults parse")
    }

    pub fn zero() -> Self {
        Self {
            climate_control: 0.0,
            cu_supply: 0.0,
            cu_signal_processing_base: 0.0,
            cu_signal_processing_per_antenna: 0.0,
            eo_per_wavelength: 0.0,
            oe_per_wavelength: 0.0,
            rrh_supply: 0.0,
            rrh_signal_processing_base: 0.0,
            rrh_signal_processing_per_antenna: 0.0,
            digital_sp_increment: 0.0,
            adc_per_converter: 0.0,
            dac_per_converter: 0.0,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let p: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("climate_control", self.climate_control),
            ("cu_supply", self.cu_supply),
            ("cu_signal_processing_base", self.cu_signal_processing_base),
            ("cu_signal_processing_per_antenna", self.cu_signal_processing_per_antenna),
            ("eo_per_wavelength", self.eo_per_wavelength),
            ("oe_per_wavelength", self.oe_per_wavelength),
            ("rrh_supply", self.rrh_supply),
            ("rrh_signal_processing_base", self.rrh_signal_processing_base),
            ("rrh_signal_processing_per_antenna", self.rrh_signal_processing_per_antenna),
            ("digital_sp_increment", self.digital_sp_increment),
            ("adc_per_converter", self.adc_per_converter),
            ("dac_per_converter", self.dac_per_converter),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(
                    "power params",
                    format!("{name} must be a finite non-negative wattage, got {v}"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkKind {
    #[serde(alias = "ARoF", alias = "a-rof")]
    Arof,
    #[serde(alias = "DRoF", alias = "d-rof")]
    Drof,
}

impl LinkKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LinkKind::Arof => "arof",
            LinkKind::Drof => "drof",
        }
    }
}

impl std::fmt::Display for LinkKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for LinkKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "arof" | "a-rof" => Ok(LinkKind::Arof),
            "drof" | "d-rof" => Ok(LinkKind::Drof),
            other => Err(Error::Config(format!("unknown link kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CuPower {
    pub climate: f64,
    pub supply: f64,
    pub signal_processing: f64,
    pub eo: f64,
    pub adc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RrhPower {
    pub oe: f64,
    pub supply: f64,
    pub signal_processing: f64,
    pub dac: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerBreakdown {
    pub cu_watts: CuPower,
    pub rrh_watts: RrhPower,
    pub total_watts: f64,
}

impl PowerBreakdown {
    pub fn items(&self) -> [f64; 9] {
        let (c, r) = (&self.cu_watts, &self.rrh_watts);
        [
            c.climate,
            c.supply,
            c.signal_processing,
            c.eo,
            c.adc,
            r.oe,
            r.supply,
            r.signal_processing,
            r.dac,
        ]
    }
}

pub fn link_power(params: &PowerParams, geom: &MimoGeometry, kind: LinkKind) -> PowerBreakdown {
    let wl = f64::from(geom.wavelengths());
    let digital = kind == LinkKind::Drof;
    let only_drof = |v: f64| if digital { v * wl } else { 0.0 };

    let cu_watts = CuPower {
        climate: params.climate_control,
        supply: params.cu_supply,
        signal_processing: params.cu_signal_processing_base
            + params.cu_signal_processing_per_antenna * wl,
        eo: params.eo_per_wavelength * wl,
        adc: only_drof(params.adc_per_converter),
    };
    let rrh_watts = RrhPower {
        oe: params.oe_per_wavelength * wl,
        supply: params.rrh_supply,
        signal_processing: params.rrh_signal_processing_base
            + params.rrh_signal_processing_per_antenna * wl
            + only_drof(params.digital_sp_increment),
        dac: only_drof(params.dac_per_converter),
    };
    let mut b = PowerBreakdown {
        cu_watts,
        rrh_watts,
        total_watts: 0.0,
    };
    b.total_watts = b.items().iter().sum();
    b
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerRow {
    pub n_t: u32,
    pub arof_watts: f64,
    pub drof_watts: f64,
}

/// Both chains' totals for each antenna count; sectors and receive antennas come from `geom`.
pub fn power_sweep(
    params: &PowerParams,
    geom: &MimoGeometry,
    antenna_counts: &[u32],
) -> Result<Vec<PowerRow>> {
    power_sweep_with(Execution::default(), params, geom, antenna_counts)
}

pub fn power_sweep_with(
    exec: Execution,
    params: &PowerParams,
    geom: &MimoGeometry,
    antenna_counts: &[u32],
) -> Result<Vec<PowerRow>> {
    if antenna_counts.is_empty() {
        return Err(Error::invalid("power sweep", "no antenna counts"));
    }
    params.validate()?;
    exec::map(exec, antenna_counts, |i, &n_t| {
        let g = MimoGeometry::new(n_t, geom.rx_antennas, geom.sectors).map_err(|e| e.at_point(i))?;
        Ok(PowerRow {
            n_t,
            arof_watts: link_power(params, &g, LinkKind::Arof).total_watts,
            drof_watts: link_power(params, &g, LinkKind::Drof).total_watts,
        })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn geom(nt: u32, m: u32) -> MimoGeometry {
        MimoGeometry::new(nt, nt, m).unwrap()
    }

    #[test]
    fn zero_params_zero_power() {
        for kind in [LinkKind::Arof, LinkKind::Drof] {
            assert_eq!(link_power(&PowerParams::zero(), &geom(16, 3), kind).total_watts, 0.0);
        }
    }

    #[test]
    fn dac_only_scales_with_wavelengths() {
        let p = PowerParams {
            dac_per_converter: 1.0,
            ..PowerParams::zero()
        };
        assert_eq!(link_power(&p, &geom(16, 3), LinkKind::Drof).rrh_watts.dac, 48.0);
        assert_eq!(link_power(&p, &geom(16, 3), LinkKind::Arof).rrh_watts.dac, 0.0);
        assert_eq!(link_power(&p, &geom(16, 3), LinkKind::Arof).cu_watts.adc, 0.0);
    }

    #[test]
    fn shipped_default_orders_chains() {
        let p = PowerParams::shipped_default();
        let a = link_power(&p, &geom(16, 3), LinkKind::Arof);
        let d = link_power(&p, &geom(16, 3), LinkKind::Drof);
        assert!(d.total_watts > a.total_watts);
    }

    #[test]
    fn sweep_examples() {
        let p = PowerParams::shipped_default();
        let g = geom(1, 3);
        let one = power_sweep(&p, &g, &[1]).unwrap();
        assert_eq!(one[0].arof_watts, link_power(&p, &g, LinkKind::Arof).total_watts);

        let counts: Vec<u32> = (1..=64).collect();
        let rows = power_sweep(&p, &g, &counts).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].drof_watts - w[1].arof_watts > w[0].drof_watts - w[0].arof_watts);
        }

        let flat = PowerParams {
            climate_control: 10.0,
            rrh_supply: 3.0,
            ..PowerParams::zero()
        };
        let rows = power_sweep(&flat, &g, &counts).unwrap();
        assert!(rows.iter().all(|r| r.arof_watts == 13.0 && r.drof_watts == 13.0));
        assert!(power_sweep(&p, &g, &[]).is_err());
        assert!(matches!(power_sweep(&p, &g, &[2, 0]), Err(Error::Point { index: 1, .. })));
    }

    #[test]
    fn unknown_keys_and_negative_values_rejected() {
        let mut text = DEFAULT_PARAMS_TOML.to_string();
        text.push_str("\nbogus = 1.0\n");
        assert!(PowerParams::from_toml(&text).is_err());
        let neg = DEFAULT_PARAMS_TOML.replace("rrh_supply = ", "rrh_supply = -");
        assert!(PowerParams::from_toml(&neg).is_err());
    }

    fn arb_params() -> impl Strategy<Value = PowerParams> {
        proptest::collection::vec(0.0f64..100.0, 12).prop_map(|v| PowerParams {
            climate_control: v[0],
            cu_supply: v[1],
            cu_signal_processing_base: v[2],
            cu_signal_processing_per_antenna: v[3],
            eo_per_wavelength: v[4],
            oe_per_wavelength: v[5],
            rrh_supply: v[6],
            rrh_signal_processing_base: v[7],
            rrh_signal_processing_per_antenna: v[8],
            digital_sp_increment: v[9],
            adc_per_converter: v[10],
            dac_per_converter: v[11],
        })
    }

    proptest! {
        #[test]
        fn total_is_sum_of_items(p in arb_params(), nt in 1u32..64, m in 1u32..6) {
            for kind in [LinkKind::Arof, LinkKind::Drof] {
                let b = link_power(&p, &geom(nt, m), kind);
                let sum: f64 = b.items().iter().sum();
                prop_assert!((b.total_watts - sum).abs() <= 1e-9 * sum.max(1.0));
                prop_assert!(b.items().iter().all(|&x| x >= 0.0));
            }
        }

        #[test]
        fn chain_difference_identity(p in arb_params(), nt in 1u32..64, m in 1u32..6) {
            let g = geom(nt, m);
            let diff = link_power(&p, &g, LinkKind::Drof).total_watts
                - link_power(&p, &g, LinkKind::Arof).total_watts;
            let expect = f64::from(nt * m)
                * (p.adc_per_converter + p.dac_per_converter + p.digital_sp_increment);
            prop_assert!((diff - expect).abs() <= 1e-9 * expect.max(1.0));
        }

        #[test]
        fn monotone_in_antennas(p in arb_params(), nt in 1u32..63, m in 1u32..6) {
            for kind in [LinkKind::Arof, LinkKind::Drof] {
                let lo = link_power(&p, &geom(nt, m), kind).total_watts;
                let hi = link_power(&p, &geom(nt + 1, m), kind).total_watts;
                let hm = link_power(&p, &geom(nt, m + 1), kind).total_watts;
                prop_assert!(hi >= lo && hm >= lo);
            }
        }

        #[test]
        fn monotone_in_each_coefficient(p in arb_params(), idx in 0usize..12, bump in 0.0f64..10.0) {
            let mut v = [
                p.climate_control, p.cu_supply, p.cu_signal_processing_base,
                p.cu_signal_processing_per_antenna, p.eo_per_wavelength, p.oe_per_wavelength,
                p.rrh_supply, p.rrh_signal_processing_base, p.rrh_signal_processing_per_antenna,
                p.digital_sp_increment, p.adc_per_converter, p.dac_per_converter,
            ];
            v[idx] += bump;
            let q = PowerParams {
                climate_control: v[0], cu_supply: v[1], cu_signal_processing_base: v[2],
                cu_signal_processing_per_antenna: v[3], eo_per_wavelength: v[4],
                oe_per_wavelength: v[5], rrh_supply: v[6], rrh_signal_processing_base: v[7],
                rrh_signal_processing_per_antenna: v[8], digital_sp_increment: v[9],
                adc_per_converter: v[10], dac_per_converter: v[11],
            };
            for kind in [LinkKind::Arof, LinkKind::Drof] {
                prop_assert!(link_power(&q, &geom(8, 3), kind).total_watts
                    >= link_power(&p, &geom(8, 3), kind).total_watts);
            }
        }
    }
}
