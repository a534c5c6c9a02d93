use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value violates a type invariant or an operation precondition.
    #[error("invalid {what}: {reason}")]
    InvalidParameter { what: &'static str, reason: String },

    #[error("Nyquist zone {zone} outside valid range 1..={max}")]
    ZoneOutOfRange { zone: u32, max: u32 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("occupied band [{low_ghz:.4}, {high_ghz:.4}] GHz exceeds sampler band [{min_ghz:.4}, {max_ghz:.4}] GHz")]
    BandViolation {
        low_ghz: f64,
        high_ghz: f64,
        min_ghz: f64,
        max_ghz: f64,
    },

    #[error("directly modulated laser clipped on {samples} samples (min 1+m*v = {min_drive:.4})")]
    Clipping { samples: usize, min_drive: f64 },

    #[error("non-finite field value after {z_km:.3} km of propagation")]
    NonFinite { z_km: f64 },

    #[error("unknown WDM channel {index} (plan has {count})")]
    UnknownChannel { index: usize, count: usize },

    #[error("point {index}: {source}")]
    Point {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("stage '{stage}' failed on channel {channel}: {source}")]
    Stage {
        stage: &'static str,
        channel: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("provenance mismatch in {file}: expected scenario {expected}, found {found}")]
    Provenance {
        file: String,
        expected: String,
        found: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            what,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_point(self, index: usize) -> Self {
        Error::Point {
            index,
            source: Box::new(self),
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str, channel: usize) -> Self {
        Error::Stage {
            stage,
            channel,
            source: Box::new(self),
        }
    }

    /// Process exit code: 2 for configuration problems, 3 for runtime or numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter { .. } | Error::ZoneOutOfRange { .. } => 2,
            Error::Point { source, .. } | Error::Stage { source, .. } => source.exit_code(),
            _ => 3,
        }
    }
}
