use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read audio file {path}: {reason}")]
    Unreadable { path: PathBuf, reason: String },

    #[error("unsupported encoding: {0}")]
    UnsupportedEncoding(String),

    #[error("zero-length audio")]
    ZeroLengthAudio,

    #[error("cannot write audio file {path}: {reason}")]
    WriteFailed { path: PathBuf, reason: String },

    #[error("invalid buffer: {0}")]
    InvalidBuffer(String),

    #[error("sample-rate mismatch: {0} Hz vs {1} Hz")]
    SampleRateMismatch(u32, u32),

    #[error("SNR undefined: clean signal has zero power")]
    SnrUndefined,

    #[error("noise too short: need {needed} samples, have {available}")]
    NoiseTooShort { needed: usize, available: usize },

    #[error("buffer of {len_ms:.3} ms is shorter than one {frame_ms:.3} ms frame")]
    BufferTooShort { len_ms: f64, frame_ms: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("nfft {nfft} is invalid for a frame of {frame_len} samples")]
    InvalidFftSize { nfft: usize, frame_len: usize },

    #[error("lag {max_lag} out of range for {len} samples")]
    LagOutOfRange { max_lag: usize, len: usize },

    #[error("frequency bounds [{lo}, {hi}] Hz outside spectrum support (0, {nyquist}] Hz")]
    FrequencyBounds { lo: f64, hi: f64, nyquist: f64 },

    #[error("degenerate frame")]
    DegenerateFrame,

    #[error("frame of {len} samples is too short; need at least {needed}")]
    FrameTooShort { len: usize, needed: usize },

    #[error("need {needed} IMFs but decomposition produced {available}")]
    TooFewImfs { needed: usize, available: usize },

    #[error("non-positive F0 value {0}")]
    NonPositiveF0(f64),

    #[error("track length mismatch: {0} vs {1}")]
    TrackMismatch(usize, usize),

    #[error("no frames to score")]
    NoScoredFrames,

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
