//! Plot-ready tables for the bandwidth and power comparisons.

use serde::{Deserialize, Serialize};

use crate::dimensioning::{dimension_sweep_with, linspace, CpriCoding, DimensioningReport, MimoGeometry, ModulationScheme};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::powermodel::{power_sweep_with, PowerParams, PowerRow};

/// Per-wavelength bandwidth axis of the aggregate-bandwidth table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Figure3Spec {
    pub carrier_ghz: f64,
    pub bw_start_ghz: f64,
    pub bw_stop_ghz: f64,
    pub points: usize,
}

impl Default for Figure3Spec {
    fn default() -> Self {
        Self {
            carrier_ghz: 28.0,
            bw_start_ghz: 0.05,
            bw_stop_ghz: 1.0,
            points: 20,
        }
    }
}

/// Antenna-count axis of the power table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Figure4Spec {
    pub tx_start: u32,
    pub tx_stop: u32,
    pub tx_step: u32,
}

impl Default for Figure4Spec {
    fn default() -> Self {
        Self {
            tx_start: 1,
            tx_stop: 64,
            tx_step: 1,
        }
    }
}

impl Figure4Spec {
    pub fn antenna_counts(&self) -> Result<Vec<u32>> {
        if self.tx_step == 0 || self.tx_start == 0 || self.tx_stop < self.tx_start {
            return Err(Error::invalid(
                "antenna sweep",
                format!("{}:{}:{}", self.tx_start, self.tx_stop, self.tx_step),
            ));
        }
        Ok((self.tx_start..=self.tx_stop).step_by(self.tx_step as usize).collect())
    }
}

pub fn run_figure3(
    exec: Execution,
    spec: &Figure3Spec,
    geom: &MimoGeometry,
    coding: &CpriCoding,
    modulation: &ModulationScheme,
) -> Result<Vec<DimensioningReport>> {
    if spec.points == 0 {
        return Err(Error::invalid("figure3", "no points"));
    }
    let bws = linspace(spec.bw_start_ghz, spec.bw_stop_ghz, spec.points);
    dimension_sweep_with(exec, spec.carrier_ghz, geom, coding, modulation, &bws)
}

/// Power of both chains per antenna count; sectors come from `geom`.
pub fn run_figure4(exec: Execution, spec: &Figure4Spec, params: &PowerParams, geom: &MimoGeometry) -> Result<Vec<PowerRow>> {
    power_sweep_with(exec, params, geom, &spec.antenna_counts()?)
}
