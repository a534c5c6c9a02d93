use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniformly sampled complex signal in the electrical domain.
///
/// Passband signals are stored as real values (zero imaginary part) with `center_freq_ghz` set
/// to their carrier; baseband envelopes use `center_freq_ghz = 0`. Time is in ns, frequency in GHz.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWaveform {
    samples: Vec<Complex64>,
    sample_rate_ghz: f64,
    center_freq_ghz: f64,
}

impl SampledWaveform {
    pub fn new(samples: Vec<Complex64>, sample_rate_ghz: f64, center_freq_ghz: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("waveform", "no samples"));
        }
        if !(sample_rate_ghz.is_finite() && sample_rate_ghz > 0.0) {
            return Err(Error::invalid(
                "waveform",
                format!("sample rate must be positive, got {sample_rate_ghz}"),
            ));
        }
        if !(center_freq_ghz.is_finite() && center_freq_ghz >= 0.0) {
            return Err(Error::invalid(
                "waveform",
                format!("center frequency must be non-negative, got {center_freq_ghz}"),
            ));
        }
        Ok(Self {
            samples,
            sample_rate_ghz,
            center_freq_ghz,
        })
    }

    pub fn from_real(samples: &[f64], sample_rate_ghz: f64, center_freq_ghz: f64) -> Result<Self> {
        Self::new(
            samples.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            sample_rate_ghz,
            center_freq_ghz,
        )
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate_ghz(&self) -> f64 {
        self.sample_rate_ghz
    }

    pub fn center_freq_ghz(&self) -> f64 {
        self.center_freq_ghz
    }

    /// Frame length in ns.
    pub fn duration_ns(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_ghz
    }

    /// `sum |x|^2 * dt`.
    pub fn energy(&self) -> f64 {
        super::spectrum::energy(&self.samples) / self.sample_rate_ghz
    }

    pub fn mean_power(&self) -> f64 {
        super::spectrum::mean_power(&self.samples)
    }

    pub fn rms(&self) -> f64 {
        self.mean_power().sqrt()
    }

    /// RMS of the real part only.
    pub fn rms_real(&self) -> f64 {
        (self.samples.iter().map(|v| v.re * v.re).sum::<f64>() / self.len() as f64).sqrt()
    }

    pub fn with_samples(&self, samples: Vec<Complex64>) -> Result<Self> {
        Self::new(samples, self.sample_rate_ghz, self.center_freq_ghz)
    }

    pub fn write_rofw<W: Write>(&self, w: W) -> Result<()> {
        write_interchange(
            w,
            *WAVEFORM_MAGIC,
            self.sample_rate_ghz * 1e9,
            self.center_freq_ghz * 1e9,
            &self.samples,
        )
    }

    pub fn read_rofw<R: Read>(r: R) -> Result<Self> {
        let (rate_hz, center_hz, samples) = read_interchange(r, *WAVEFORM_MAGIC)?;
        Self::new(samples, rate_hz / 1e9, center_hz / 1e9)
    }
}

pub const WAVEFORM_MAGIC: &[u8; 4] = b"ROFW";
pub const OPTICAL_MAGIC: &[u8; 4] = b"ROFO";
pub const INTERCHANGE_VERSION: u32 = 1;

/// Little-endian dump: magic, version u32, sample rate (Hz) f64, header value f64, count u64,
/// then interleaved re/im f64 pairs.
pub(crate) fn write_interchange<W: Write>(
    mut w: W,
    magic: [u8; 4],
    sample_rate_hz: f64,
    header_value: f64,
    samples: &[Complex64],
) -> Result<()> {
    let mut buf = Vec::with_capacity(32 + samples.len() * 16);
    buf.extend_from_slice(&magic);
    buf.extend_from_slice(&INTERCHANGE_VERSION.to_le_bytes());
    buf.extend_from_slice(&sample_rate_hz.to_le_bytes());
    buf.extend_from_slice(&header_value.to_le_bytes());
    buf.extend_from_slice(&(samples.len() as u64).to_le_bytes());
    for s in samples {
        buf.extend_from_slice(&s.re.to_le_bytes());
        buf.extend_from_slice(&s.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub(crate) fn read_interchange<R: Read>(
    mut r: R,
    magic: [u8; 4],
) -> Result<(f64, f64, Vec<Complex64>)> {
    let mut head = [0u8; 32];
    r.read_exact(&mut head)?;
    if head[..4] != magic {
        return Err(Error::Config(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&head[..4]),
            String::from_utf8_lossy(&magic)
        )));
    }
    let word = |i: usize| -> [u8; 8] { head[i..i + 8].try_into().unwrap() };
    let version = u32::from_le_bytes(head[4..8].try_into().unwrap());
    if version != INTERCHANGE_VERSION {
        return Err(Error::Config(format!("unsupported interchange version {version}")));
    }
    let rate = f64::from_le_bytes(word(8));
    let value = f64::from_le_bytes(word(16));
    let count = u64::from_le_bytes(word(24)) as usize;
    let mut body = vec![0u8; count * 16];
    r.read_exact(&mut body)?;
    let samples = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    Ok((rate, value, samples))
}
