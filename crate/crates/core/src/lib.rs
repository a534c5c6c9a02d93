//! Analogue vs digitised radio-over-fiber fronthaul toolkit.
//!
//! * [`dimensioning`]: closed-form bandpass-sampling and CPRI bandwidth/bit-rate comparison.
//! * [`powermodel`]: component-wise CU/RRH power consumption for both fronthaul chains.
//! * [`dsp`]: electrical signal chain (QAM, RRC shaping, mixing, bandpass ADC/DAC, EVM).
//! * [`optics`]: E/O conversion, WDM, split-step fiber propagation, photodetection.
//! * [`harness`]: scenarios, sweeps, figure tables, result files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dimensioning;
pub mod dsp;
pub mod error;
pub mod exec;
pub mod harness;
pub mod optics;
pub mod powermodel;

pub use error::{Error, Result};
