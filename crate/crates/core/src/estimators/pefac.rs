//! PEFAC-lite.
//!
//! The frame's power spectrum is resampled on a log2 frequency axis, where
//! the harmonics of any F0 sit at fixed offsets `log2(h)`. Convolving with a
//! comb of impulses at those offsets (weights `1/h`), each flanked by
//! negative impulses between the neighbouring harmonics, sums harmonic
//! energy and scores a featureless spectrum as zero.
//! The full PEFAC noise normalization and temporal smoothing are not
//! implemented.

use crate::error::{Error, Result};
use crate::signal::Window;
use crate::spectral::{power_spectrum, to_log_frequency, LogSpectrum};

use super::{
    analysis_nfft, check_frame, parabolic_offset, CandidateSource, EstimatorConfig, PitchCandidate,
};

const BINS_PER_OCTAVE: usize = 96;
/// Spectral compression applied before harmonic summation.
const COMPRESSION: f64 = 0.5;

/// Comb-filter response for every grid F0 in `[f_min, f_max]`.
#[derive(Debug, Clone)]
pub struct PefacScores {
    pub f0_hz: Vec<f64>,
    pub score: Vec<f64>,
    grid: LogSpectrum,
}

pub fn pefac_scores(
    frame: &[f64],
    sample_rate_hz: u32,
    cfg: &EstimatorConfig,
) -> Result<PefacScores> {
    cfg.validate()?;
    check_frame(frame, sample_rate_hz, cfg.f_min)?;
    let spectrum = power_spectrum(
        frame,
        sample_rate_hz,
        analysis_nfft(frame.len()),
        Window::Hann,
    )?;
    if spectrum.total() <= 0.0 {
        return Err(Error::DegenerateFrame);
    }
    let nyquist = spectrum.nyquist_hz();
    let top = (cfg.f_max * cfg.pefac_harmonics as f64).min(nyquist);
    if top <= cfg.f_max {
        return Err(Error::FrequencyBounds {
            lo: cfg.f_min,
            hi: cfg.f_max,
            nyquist,
        });
    }
    let mut grid = to_log_frequency(&spectrum, 0.5 * cfg.f_min, top, BINS_PER_OCTAVE)?;
    for v in grid.values.iter_mut() {
        *v = v.max(0.0).powf(COMPRESSION);
    }
    let teeth = comb(cfg.pefac_harmonics);
    let step = grid.step_log2;
    let first = (((cfg.f_min.log2() - grid.log2_f_start) / step) - 1e-9).ceil() as usize;
    let last = (((cfg.f_max.log2() - grid.log2_f_start) / step) + 1e-9).floor() as usize;
    let last = last.min(grid.values.len() - 1);
    let mut f0_hz = Vec::with_capacity(last + 1 - first);
    let mut score = Vec::with_capacity(last + 1 - first);
    for i in first..=last {
        let base = grid.log2_freq(i);
        let sum: f64 = tooth_contrasts(&grid, &teeth, base)
            .iter()
            .zip(&teeth)
            .map(|(c, t)| t.weight * c)
            .sum();
        f0_hz.push(base.exp2());
        score.push(sum);
    }
    // Express scores relative to the frame's mean compressed level so the
    // salience is comparable across frames and modes.
    let level = grid.values.iter().sum::<f64>() / grid.values.len() as f64;
    let total_weight: f64 = teeth.iter().map(|t| t.weight).sum();
    if level > 0.0 {
        score.iter_mut().for_each(|v| *v /= level * total_weight);
    }
    Ok(PefacScores { f0_hz, score, grid })
}

struct Tooth {
    peak: f64,
    troughs: [f64; 4],
    weight: f64,
}

/// Each tooth at log2(h) is balanced by quarter-weight troughs one third and
/// one half of the way to both neighbours, so the comb sums to zero and
/// penalises candidates at two or three times the true F0.
fn comb(harmonics: usize) -> Vec<Tooth> {
    (1..=harmonics)
        .map(|h| {
            let h = h as f64;
            Tooth {
                peak: h.log2(),
                troughs: [h - 0.5, h - 1.0 / 3.0, h + 1.0 / 3.0, h + 0.5].map(f64::log2),
                weight: 1.0 / h,
            }
        })
        .collect()
}

/// Unweighted peak-minus-trough contrast of each tooth that fits on the grid
/// for the candidate at `base` (log2 Hz).
fn tooth_contrasts(grid: &LogSpectrum, teeth: &[Tooth], base: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(teeth.len());
    for t in teeth {
        let Some(p) = grid.value_at_log2(base + t.peak) else {
            break;
        };
        let troughs: Option<Vec<f64>> = t
            .troughs
            .iter()
            .map(|&o| grid.value_at_log2(base + o))
            .collect();
        let Some(troughs) = troughs else {
            break;
        };
        out.push(p - 0.25 * troughs.iter().sum::<f64>());
    }
    out
}

/// Harmonic-summation F0 estimate of one frame.
pub fn pefac_estimate(
    frame: &[f64],
    sample_rate_hz: u32,
    cfg: &EstimatorConfig,
) -> Result<PitchCandidate> {
    let scores = pefac_scores(frame, sample_rate_hz, cfg)?;
    let s = &scores.score;
    let best = crate::spectral::argmax(s).ok_or(Error::DegenerateFrame)?;
    let offset = if best > 0 && best + 1 < s.len() {
        parabolic_offset(s[best - 1], s[best], s[best + 1])
    } else {
        0.0
    };
    let f0 = (scores.f0_hz[best].log2() + offset * scores.grid.step_log2)
        .exp2()
        .clamp(cfg.f_min, cfg.f_max);
    Ok(PitchCandidate {
        f0_hz: f0,
        salience: s[best],
        source: CandidateSource::Pefac,
        low_confidence: s[best] <= 0.0 || s[best] < cfg.pefac_min_salience,
    })
}
