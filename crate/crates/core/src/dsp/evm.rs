use num_complex::Complex64;

use super::qam::SymbolFrame;
use crate::error::{Error, Result};

/// Fewest symbols accepted for an EVM estimate.
pub const MIN_SYMBOLS: usize = 100;

/// RMS error vector magnitude after single-tap complex equalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvmReport {
    pub evm_percent_rms: f64,
    pub symbols_used: usize,
    pub equalizer_gain: Complex64,
}

/// Fit the least-squares gain `g` mapping `received` onto `reference`, then report
/// `100 sqrt(mean|g r - s|^2 / mean|s|^2)`.
pub fn measure_evm(reference: &SymbolFrame, received: &SymbolFrame) -> Result<EvmReport> {
    let (s, r) = (&reference.symbols, &received.symbols);
    if s.len() != r.len() {
        return Err(Error::LengthMismatch {
            left: s.len(),
            right: r.len(),
        });
    }
    if s.len() < MIN_SYMBOLS {
        return Err(Error::invalid(
            "EVM",
            format!("{} symbols; at least {MIN_SYMBOLS} required", s.len()),
        ));
    }
    let cross: Complex64 = r.iter().zip(s).map(|(r, s)| r.conj() * s).sum();
    let rx_energy: f64 = r.iter().map(|v| v.norm_sqr()).sum();
    let ref_energy: f64 = s.iter().map(|v| v.norm_sqr()).sum();
    if !(ref_energy > 0.0) {
        return Err(Error::invalid("EVM", "reference frame has no energy"));
    }
    if !rx_energy.is_finite() || !cross.re.is_finite() || !cross.im.is_finite() {
        return Err(Error::invalid("EVM", "received frame is not finite"));
    }
    let g = if rx_energy > 0.0 { cross / rx_energy } else { Complex64::default() };
    let err: f64 = r.iter().zip(s).map(|(r, s)| (g * r - s).norm_sqr()).sum();
    Ok(EvmReport {
        evm_percent_rms: 100.0 * (err / ref_energy).sqrt(),
        symbols_used: s.len(),
        equalizer_gain: g,
    })
}
