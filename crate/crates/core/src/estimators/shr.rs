//! Subharmonic-to-harmonic ratio (SHR) pitch estimation.
//!
//! For each F0 on a log-frequency grid, `SH` sums the amplitude spectrum at
//! the harmonics `n·F0` and `SS` at the half-way points `(n − ½)·F0`. The
//! harmonic pick is the F0 maximizing `SH`; when `SS/SH` there exceeds the
//! threshold the subharmonic interpretation wins and half of it is returned.

use crate::error::{Error, Result};
use crate::signal::Window;
use crate::spectral::{argmax, power_spectrum, to_log_frequency, LogSpectrum};

use super::{
    analysis_nfft, check_frame, parabolic_offset, CandidateSource, EstimatorConfig, PitchCandidate,
};

const BINS_PER_OCTAVE: usize = 96;
/// Below this salience a frame has no usable harmonic structure.
const LOW_CONFIDENCE: f64 = 0.05;

/// `(SH, SS)` for one F0 on a log-amplitude grid.
pub fn harmonic_sums(spec: &LogSpectrum, f0_hz: f64, harmonics: usize) -> (f64, f64) {
    let base = f0_hz.log2();
    let mut sh = 0.0;
    let mut ss = 0.0;
    for n in 1..=harmonics {
        let n = n as f64;
        if let Some(v) = spec.value_at_log2(base + n.log2()) {
            sh += v;
        }
        if let Some(v) = spec.value_at_log2(base + (n - 0.5).log2()) {
            ss += v;
        }
    }
    (sh, ss)
}

#[derive(Debug, Clone)]
pub struct ShrAnalysis {
    pub f0_grid: Vec<f64>,
    pub sh: Vec<f64>,
    pub ss: Vec<f64>,
    /// Index of the harmonic pick.
    pub harmonic_pick: usize,
    /// `SS/SH` at the harmonic pick.
    pub ratio: f64,
    log_spec: LogSpectrum,
}

pub fn shr_analyze(
    frame: &[f64],
    sample_rate_hz: u32,
    cfg: &EstimatorConfig,
) -> Result<ShrAnalysis> {
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
    let amplitude = spectrum.to_magnitude();
    let nyquist = amplitude.nyquist_hz();
    let lo = 0.5 * cfg.f_min;
    let hi = (cfg.f_max * cfg.shr_harmonics as f64).min(nyquist);
    let log_spec = to_log_frequency(&amplitude, lo, hi, BINS_PER_OCTAVE)?;
    let first =
        ((cfg.f_min.log2() - log_spec.log2_f_start) / log_spec.step_log2 - 1e-9).ceil() as usize;
    let last =
        (((cfg.f_max.log2() - log_spec.log2_f_start) / log_spec.step_log2) + 1e-9).floor() as usize;
    let mut f0_grid = Vec::new();
    let mut sh = Vec::new();
    let mut ss = Vec::new();
    for i in first..=last.min(log_spec.values.len() - 1) {
        let f = log_spec.freq_hz(i);
        let (h, s) = harmonic_sums(&log_spec, f, cfg.shr_harmonics);
        f0_grid.push(f);
        sh.push(h);
        ss.push(s);
    }
    let harmonic_pick = argmax(&sh).ok_or(Error::DegenerateFrame)?;
    let ratio = if sh[harmonic_pick] > 0.0 {
        ss[harmonic_pick] / sh[harmonic_pick]
    } else {
        1.0
    };
    Ok(ShrAnalysis {
        f0_grid,
        sh,
        ss,
        harmonic_pick,
        ratio,
        log_spec,
    })
}

pub fn shr_estimate(
    frame: &[f64],
    sample_rate_hz: u32,
    cfg: &EstimatorConfig,
) -> Result<PitchCandidate> {
    let a = shr_analyze(frame, sample_rate_hz, cfg)?;
    let i = a.harmonic_pick;
    let offset = if i > 0 && i + 1 < a.sh.len() {
        parabolic_offset(a.sh[i - 1], a.sh[i], a.sh[i + 1])
    } else {
        0.0
    };
    let harmonic_f0 = (a.f0_grid[i].log2() + offset * a.log_spec.step_log2).exp2();
    let f0 = if a.ratio > cfg.shr_threshold && 0.5 * harmonic_f0 >= cfg.f_min {
        0.5 * harmonic_f0
    } else {
        harmonic_f0
    }
    .clamp(cfg.f_min, cfg.f_max);
    let (sh, ss) = harmonic_sums(&a.log_spec, f0, cfg.shr_harmonics);
    let salience = if sh + ss > 0.0 {
        (sh - ss) / (sh + ss)
    } else {
        0.0
    };
    Ok(PitchCandidate {
        f0_hz: f0,
        salience,
        source: CandidateSource::Shr,
        low_confidence: salience < LOW_CONFIDENCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Spectrum, SpectrumKind};

    fn comb_log_spectrum(f0: f64, amp: impl Fn(usize) -> f64) -> LogSpectrum {
        // Triangular peaks, 40 Hz wide, on a fine linear grid.
        let bin_hz = 0.5;
        let bins: Vec<f64> = (0..8001)
            .map(|k| {
                let f = k as f64 * bin_hz;
                let h = (f / f0).round();
                if h >= 1.0 && (f - h * f0).abs() < 20.0 {
                    amp(h as usize) * (1.0 - (f - h * f0).abs() / 20.0)
                } else {
                    0.0
                }
            })
            .collect();
        let s = Spectrum {
            bins,
            bin_hz,
            kind: SpectrumKind::Magnitude,
        };
        to_log_frequency(&s, 25.0, 3200.0, BINS_PER_OCTAVE).unwrap()
    }

    #[test]
    fn pure_comb_has_no_subharmonic_energy() {
        let spec = comb_log_spectrum(200.0, |_| 1.0);
        let (sh, ss) = harmonic_sums(&spec, 200.0, 8);
        assert!(ss / sh <= 0.05, "SHR {}", ss / sh);
    }

    #[test]
    fn flat_frame_is_low_confidence() {
        let mut x = vec![0.0; 480];
        x[240] = 1.0;
        let c = shr_estimate(&x, 8000, &EstimatorConfig::default()).unwrap();
        assert!(c.low_confidence);
        assert!(c.salience.abs() < LOW_CONFIDENCE);
    }
}
