//! Electrical-domain signal chain.

pub mod evm;
pub mod mixer;
pub mod pulse;
pub mod qam;
pub mod sampling;
pub mod spectrum;
pub mod waveform;

pub use evm::{measure_evm, EvmReport};
pub use mixer::{downconvert, upconvert, upconvert_to};
pub use pulse::{matched_filter, pulse_shape, pulse_shape_with, RrcFilter};
pub use qam::{qam_demodulate, qam_modulate, SymbolFrame};
pub use sampling::{bandpass_sample_quantize, dac_reconstruct, interpolate_iq, QuantizedStream, QuantizerSpec};
pub use waveform::SampledWaveform;
