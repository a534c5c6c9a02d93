//! Optical-domain models: E/O conversion, WDM, fiber propagation and detection.

pub mod detector;
pub mod ebpf;
pub mod fiber;
pub mod field;
pub mod modulator;
pub mod wdm;

pub use detector::{photodetect, PhotodetectorSpec};
pub use ebpf::electrical_bandpass;
pub use fiber::{fiber_propagate, FiberParams, StepControl};
pub use field::{dbm_to_w, w_to_dbm, ChannelSlot, OpticalField};
pub use modulator::{eo_convert, ModulatorKind, ModulatorSpec};
pub use wdm::{wdm_demux, wdm_mux, DemuxFilter};
