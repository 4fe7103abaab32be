//! Gross error rate, mean absolute error and low/high separation error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pro::{FrequencyRegion, Region};

use super::track::FramePitchTrack;

/// Relative deviation above which a frame counts as a gross error.
pub const GROSS_ERROR_THRESHOLD: f64 = 0.20;

/// Which frames enter the GE/MAE denominators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum VoicingGate {
    /// Frames voiced in the reference.
    #[default]
    RefVoiced,
    /// Frames the detector marked voiced that also carry a reference F0.
    DetectedVoiced,
}

fn check_aligned(est: &FramePitchTrack, reference: &FramePitchTrack) -> Result<()> {
    if est.len() != reference.len() {
        return Err(Error::TrackMismatch(est.len(), reference.len()));
    }
    Ok(())
}

/// Gated frames as `(estimate, reference)` pairs.
fn gated<'a>(
    est: &'a FramePitchTrack,
    reference: &'a FramePitchTrack,
    gate: VoicingGate,
) -> impl Iterator<Item = (Option<f64>, f64)> + 'a {
    (0..est.len()).filter_map(move |q| {
        let r = reference.f0_hz[q].filter(|_| reference.voiced_mask[q])?;
        match gate {
            VoicingGate::RefVoiced => Some((est.f0_hz[q], r)),
            VoicingGate::DetectedVoiced => est.voiced_mask[q].then_some((est.f0_hz[q], r)),
        }
    })
}

/// Number of frames that enter the GE denominator.
pub fn gated_frame_count(
    est: &FramePitchTrack,
    reference: &FramePitchTrack,
    gate: VoicingGate,
) -> usize {
    if est.len() != reference.len() {
        return 0;
    }
    gated(est, reference, gate).count()
}

/// Percentage of gated frames whose estimate is missing or deviates from
/// the reference by more than 20 %.
pub fn gross_error(
    est: &FramePitchTrack,
    reference: &FramePitchTrack,
    gate: VoicingGate,
) -> Result<f64> {
    check_aligned(est, reference)?;
    let mut total = 0usize;
    let mut errors = 0usize;
    for (e, r) in gated(est, reference, gate) {
        total += 1;
        let bad = match e {
            Some(e) => ((e - r) / r).abs() > GROSS_ERROR_THRESHOLD,
            None => true,
        };
        errors += usize::from(bad);
    }
    if total == 0 {
        return Err(Error::NoScoredFrames);
    }
    Ok(100.0 * errors as f64 / total as f64)
}

/// Mean |estimate − reference| in Hz over gated frames that have an estimate.
pub fn mean_absolute_error(
    est: &FramePitchTrack,
    reference: &FramePitchTrack,
    gate: VoicingGate,
) -> Result<f64> {
    check_aligned(est, reference)?;
    let mut count = 0usize;
    let mut sum = 0.0;
    for (e, r) in gated(est, reference, gate) {
        if let Some(e) = e {
            count += 1;
            sum += (e - r).abs();
        }
    }
    if count == 0 {
        return Err(Error::NoScoredFrames);
    }
    Ok(sum / count as f64)
}

/// Reference region of an F0 value, with `≤ gamma` counting as low.
pub fn reference_region(f0: f64, gamma: f64) -> Region {
    if f0 <= gamma {
        Region::Low
    } else {
        Region::High
    }
}

/// Percentage of reference-voiced frames whose predicted region differs
/// from the one implied by the reference F0.
pub fn separation_error(
    pred: &[FrequencyRegion],
    reference: &FramePitchTrack,
    gamma: f64,
) -> Result<f64> {
    if pred.len() != reference.len() {
        return Err(Error::TrackMismatch(pred.len(), reference.len()));
    }
    let mut total = 0usize;
    let mut wrong = 0usize;
    for (p, (f, &v)) in pred
        .iter()
        .zip(reference.f0_hz.iter().zip(&reference.voiced_mask))
    {
        if let (Some(f), true) = (f, v) {
            total += 1;
            wrong += usize::from(p.region != reference_region(*f, gamma));
        }
    }
    if total == 0 {
        return Err(Error::NoScoredFrames);
    }
    Ok(100.0 * wrong as f64 / total as f64)
}
