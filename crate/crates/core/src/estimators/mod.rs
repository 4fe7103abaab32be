//! Frame-level F0 estimators.
//!
//! * [`pefac`]: PEFAC-lite, harmonic summation on a log-frequency power spectrum.
//! * [`shr`]: subharmonic-to-harmonic ratio.
//! * [`swipe`]: average peak-to-valley distance over the first harmonics.
//! * [`hht`]: HHT-Amp, periodicity of the instantaneous amplitude of IMFs.

pub mod hht;
pub mod pefac;
pub mod shr;
pub mod swipe;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use hht::{hht_candidates, hht_select, IntervalCandidates};
pub use pefac::pefac_estimate;
pub use shr::shr_estimate;
pub use swipe::swipe_estimate;

/// Which estimator produced a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CandidateSource {
    Pefac,
    Shr,
    Swipe,
    /// HHT-Amp candidate taken from IMF `k` (1-based).
    HhtImf(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchCandidate {
    pub f0_hz: f64,
    /// Estimator-specific score; higher is stronger.
    pub salience: f64,
    pub source: CandidateSource,
    /// Set when the frame shows no usable harmonic structure.
    pub low_confidence: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Pefac,
    Shr,
    Swipe,
    Hht,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 4] = [
        EstimatorKind::Pefac,
        EstimatorKind::Shr,
        EstimatorKind::Swipe,
        EstimatorKind::Hht,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Pefac => "pefac",
            EstimatorKind::Shr => "shr",
            EstimatorKind::Swipe => "swipe",
            EstimatorKind::Hht => "hht",
        }
    }

    /// Whether the estimator needs an IMF decomposition of the signal.
    pub fn needs_imfs(self) -> bool {
        matches!(self, EstimatorKind::Hht)
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pefac" | "pefac-lite" => Ok(EstimatorKind::Pefac),
            "shr" => Ok(EstimatorKind::Shr),
            "swipe" => Ok(EstimatorKind::Swipe),
            "hht" | "hht-amp" => Ok(EstimatorKind::Hht),
            other => Err(Error::InvalidConfig(format!("unknown estimator '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    /// Search range for PEFAC-lite, SHR and HHT-Amp.
    pub f_min: f64,
    pub f_max: f64,
    /// SWIPE searches its own, wider range.
    pub swipe_f_min: f64,
    pub swipe_f_max: f64,
    pub shr_threshold: f64,
    pub shr_harmonics: usize,
    pub swipe_bins_per_octave: usize,
    pub swipe_peaks: usize,
    pub pefac_harmonics: usize,
    /// PEFAC-lite picks whose salience (comb response relative to the mean
    /// spectral level) falls below this are flagged low-confidence.
    pub pefac_min_salience: f64,
    pub hht_num_imfs: usize,
    /// Analysis frame length used by SHR, SWIPE and HHT-Amp on the 10 ms grid.
    pub frame_ms: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            f_min: 50.0,
            f_max: 400.0,
            swipe_f_min: 50.0,
            swipe_f_max: 500.0,
            shr_threshold: 0.4,
            shr_harmonics: 8,
            swipe_bins_per_octave: 48,
            swipe_peaks: 5,
            pefac_harmonics: 10,
            pefac_min_salience: 2.25,
            hht_num_imfs: 3,
            frame_ms: 60.0,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.f_min > 0.0 && self.f_min < self.f_max) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < f_min < f_max, got [{}, {}]",
                self.f_min, self.f_max
            )));
        }
        if !(self.swipe_f_min > 0.0 && self.swipe_f_min < self.swipe_f_max) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < swipe_f_min < swipe_f_max, got [{}, {}]",
                self.swipe_f_min, self.swipe_f_max
            )));
        }
        if self.shr_harmonics == 0
            || self.swipe_bins_per_octave == 0
            || self.swipe_peaks == 0
            || self.pefac_harmonics == 0
            || self.hht_num_imfs == 0
        {
            return Err(Error::InvalidConfig(
                "harmonic/peak/mode counts must be positive".into(),
            ));
        }
        if !(self.pefac_min_salience >= 0.0) {
            return Err(Error::InvalidConfig(
                "pefac_min_salience must be non-negative".into(),
            ));
        }
        if !(self.shr_threshold > 0.0) || !(self.frame_ms > 0.0) {
            return Err(Error::InvalidConfig(
                "shr_threshold and frame_ms must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Shortest frame (in samples) that holds two periods at `f_min`.
pub(crate) fn check_frame(frame: &[f64], sample_rate_hz: u32, f_min: f64) -> Result<()> {
    let needed = (2.0 * sample_rate_hz as f64 / f_min).ceil() as usize;
    if frame.len() < needed {
        return Err(Error::FrameTooShort {
            len: frame.len(),
            needed,
        });
    }
    if frame.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateFrame);
    }
    Ok(())
}

/// Zero-padded FFT size giving at least four times the frame length.
pub(crate) fn analysis_nfft(frame_len: usize) -> usize {
    crate::spectral::next_pow2(4 * frame_len).max(1024)
}

/// Vertex offset in `[-0.5, 0.5]` of the parabola through three points.
pub(crate) fn parabolic_offset(left: f64, mid: f64, right: f64) -> f64 {
    let denom = left - 2.0 * mid + right;
    if denom >= 0.0 || !denom.is_finite() {
        return 0.0;
    }
    (0.5 * (left - right) / denom).clamp(-0.5, 0.5)
}
