//! HHT-Amp: pitch from the periodicity of IMF instantaneous amplitudes.
//!
//! Each of the first modes contributes at most one candidate per 10 ms
//! interval: the lowest lag in `[fs/f_max, fs/f_min]` at which the
//! autocorrelation of its (mean-removed) Hilbert envelope peaks.

use crate::emd::ImfSet;
use crate::error::{Error, Result};
use crate::signal::{centered_frame_count, ms_to_samples, SampleBuffer};
use crate::spectral::{autocorrelation, envelope};

use super::{parabolic_offset, CandidateSource, EstimatorConfig, PitchCandidate};

/// Spacing of candidate sets.
pub const INTERVAL_MS: f64 = 10.0;

/// Candidates from the first modes for one interval centred at `time_ms`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalCandidates {
    pub time_ms: f64,
    pub candidates: Vec<PitchCandidate>,
}

/// Lowest-lag ACF peak of an amplitude envelope within the F0 range.
///
/// Returns `(f0_hz, r(τ₀)/r(0))`, or `None` when the envelope is flat or
/// has no peak in range.
pub fn envelope_period(
    env: &[f64],
    sample_rate_hz: u32,
    f_min: f64,
    f_max: f64,
) -> Option<(f64, f64)> {
    let fs = sample_rate_hz as f64;
    let lag_min = ((fs / f_max).floor() as usize).max(1);
    let lag_max = (fs / f_min).ceil() as usize;
    if env.len() < 3 || lag_min + 1 >= env.len() {
        return None;
    }
    let mean = env.iter().sum::<f64>() / env.len() as f64;
    let centred: Vec<f64> = env.iter().map(|a| a - mean).collect();
    let energy: f64 = centred.iter().map(|v| v * v).sum();
    let total: f64 = env.iter().map(|v| v * v).sum();
    if !(energy > 1e-10 * total) {
        return None;
    }
    let max_lag = (lag_max + 1).min(env.len() - 1);
    let r = autocorrelation(&centred, max_lag).ok()?;
    let tau0 = (lag_min.max(1)..max_lag.min(lag_max + 1))
        .find(|&t| r[t] > r[t - 1] && r[t] >= r[t + 1] && r[t] > 0.0)?;
    let lag = tau0 as f64 + parabolic_offset(r[tau0 - 1], r[tau0], r[tau0 + 1]);
    let f0 = (fs / lag).clamp(f_min, f_max);
    Some((f0, r[tau0] / r[0]))
}

/// Per-interval candidates from the first `cfg.hht_num_imfs` modes of `imfs`,
/// the decomposition of `segment`.
pub fn hht_candidates(
    segment: &SampleBuffer,
    imfs: &ImfSet,
    cfg: &EstimatorConfig,
) -> Result<Vec<IntervalCandidates>> {
    cfg.validate()?;
    let k_modes = cfg.hht_num_imfs;
    if imfs.num_imfs() < k_modes {
        return Err(Error::TooFewImfs {
            needed: k_modes,
            available: imfs.num_imfs(),
        });
    }
    if imfs.source_len() != segment.len() {
        return Err(Error::TrackMismatch(imfs.source_len(), segment.len()));
    }
    let fs = segment.sample_rate_hz();
    let len = segment.len();
    let window_ms = cfg.frame_ms.max(2500.0 / cfg.f_min);
    let window = ms_to_samples(window_ms, fs).min(len);
    let hop = ms_to_samples(INTERVAL_MS, fs).max(1);
    let count = centered_frame_count(len, fs, INTERVAL_MS);
    let envelopes: Vec<Vec<f64>> = imfs.imfs[..k_modes]
        .iter()
        .map(|m| envelope(m))
        .collect::<Result<_>>()?;
    Ok((0..count)
        .map(|q| {
            let centre = q * hop;
            let start = centre.saturating_sub(window / 2).min(len - window);
            let candidates = envelopes
                .iter()
                .enumerate()
                .filter_map(|(k, env)| {
                    envelope_period(&env[start..start + window], fs, cfg.f_min, cfg.f_max).map(
                        |(f0, salience)| PitchCandidate {
                            f0_hz: f0,
                            salience,
                            source: CandidateSource::HhtImf(k + 1),
                            low_confidence: false,
                        },
                    )
                })
                .collect();
            IntervalCandidates {
                time_ms: q as f64 * INTERVAL_MS,
                candidates,
            }
        })
        .collect())
}

/// Picks the most salient candidate; ties go to the lowest IMF index.
/// `None` is the no-estimate sentinel for an empty list.
pub fn hht_select(cands: &[PitchCandidate]) -> Option<PitchCandidate> {
    let imf_index = |c: &PitchCandidate| match c.source {
        CandidateSource::HhtImf(k) => k,
        _ => usize::MAX,
    };
    let mut best: Option<&PitchCandidate> = None;
    for c in cands {
        best = match best {
            None => Some(c),
            Some(b) if c.salience > b.salience => Some(c),
            Some(b) if c.salience == b.salience && imf_index(c) < imf_index(b) => Some(c),
            keep => keep,
        };
    }
    best.copied()
}
