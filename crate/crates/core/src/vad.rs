//! Voiced/unvoiced detection from zero-crossing rate and short-time energy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{frame_signal, mean_power, FrameSpec, SampleBuffer, Window};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VadConfig {
    pub frame_ms: f64,
    pub hop_ms: f64,
    /// Upper bound on zero crossings per sample for a voiced frame.
    pub zcr_max: f64,
    /// Minimum frame energy as a fraction of the utterance mean frame energy.
    pub energy_min_ratio: f64,
    /// Radius of the majority filter applied to the raw decisions.
    pub hangover_frames: usize,
}

impl Default for VadConfig {
    fn default() -> Self {
        Self {
            frame_ms: 25.0,
            hop_ms: 10.0,
            zcr_max: 0.25,
            energy_min_ratio: 0.1,
            hangover_frames: 2,
        }
    }
}

impl VadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.zcr_max > 0.0 && self.zcr_max < 1.0) {
            return Err(Error::InvalidConfig("zcr_max must lie in (0, 1)".into()));
        }
        if !(self.energy_min_ratio > 0.0) {
            return Err(Error::InvalidConfig(
                "energy_min_ratio must be positive".into(),
            ));
        }
        self.frame_spec().validate()
    }

    pub fn frame_spec(&self) -> FrameSpec {
        FrameSpec {
            frame_len_ms: self.frame_ms,
            hop_ms: self.hop_ms,
            window: Window::Rectangular,
        }
    }
}

pub fn zero_crossing_rate(frame: &[f64]) -> f64 {
    if frame.is_empty() {
        return 0.0;
    }
    let crossings = frame
        .windows(2)
        .filter(|w| (w[0] < 0.0) != (w[1] < 0.0))
        .count();
    crossings as f64 / frame.len() as f64
}

/// Per-frame voicing mask over the frames of `frame_signal(buf, cfg.frame_spec())`.
pub fn detect_voiced(buf: &SampleBuffer, cfg: &VadConfig) -> Result<Vec<bool>> {
    cfg.validate()?;
    let frames = frame_signal(buf, &cfg.frame_spec())?;
    let energies: Vec<f64> = frames.iter().map(|f| mean_power(f.samples)).collect();
    let mean_energy = energies.iter().sum::<f64>() / energies.len() as f64;
    let raw: Vec<bool> = frames
        .iter()
        .zip(&energies)
        .map(|(f, &e)| {
            zero_crossing_rate(f.samples) < cfg.zcr_max && e > cfg.energy_min_ratio * mean_energy
        })
        .collect();
    Ok(majority_hold(&raw, cfg.hangover_frames))
}

/// Mask for frames centred on `q * hop_ms` (the buffer is zero-padded by
/// half a frame at both ends), with the centre times.
pub fn detect_voiced_centered(
    buf: &SampleBuffer,
    cfg: &VadConfig,
) -> Result<(Vec<f64>, Vec<bool>)> {
    let half = buf.ms_to_samples(cfg.frame_ms) / 2;
    let padded = buf.zero_padded(half, half);
    let mask = detect_voiced(&padded, cfg)?;
    let times = (0..mask.len()).map(|q| q as f64 * cfg.hop_ms).collect();
    Ok((times, mask))
}

fn majority_hold(raw: &[bool], radius: usize) -> Vec<bool> {
    if radius == 0 {
        return raw.to_vec();
    }
    (0..raw.len())
        .map(|i| {
            let lo = i.saturating_sub(radius);
            let hi = (i + radius).min(raw.len() - 1);
            let votes = raw[lo..=hi].iter().filter(|&&v| v).count();
            2 * votes > hi - lo + 1
        })
        .collect()
}
