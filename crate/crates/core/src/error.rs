use thiserror::Error;

use crate::anim_io::bvh::BvhError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid timestep {0}: dt must be finite and > 0")]
    InvalidTimestep(f64),

    #[error("invalid sample {0}: samples must be finite")]
    InvalidSample(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParams { name: &'static str, reason: String },

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error("transition window not covered: {0}")]
    Coverage(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("incompatible spectrum grids: {0}")]
    IncompatibleGrid(String),

    #[error("index {index} out of range for length {len}")]
    OutOfRange { index: usize, len: usize },

    #[error("unknown joint `{0}`")]
    UnknownJoint(String),

    #[error("joint `{joint}` has no channel `{label}`")]
    UnknownChannel { joint: String, label: String },

    #[error(transparent)]
    Bvh(#[from] BvhError),

    #[error("{path}: {source}")]
    BvhFile { path: String, source: BvhError },

    #[error("parameter file: {0}")]
    ParamFile(String),

    #[error("input: {0}")]
    Input(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParams {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures caused by malformed input files rather than bad
    /// arguments or numerical preconditions.
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            Error::Bvh(_) | Error::BvhFile { .. } | Error::ParamFile(_) | Error::Input(_) | Error::Csv(_)
        )
    }
}
