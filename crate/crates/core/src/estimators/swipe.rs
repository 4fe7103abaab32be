//! SWIPE at the average peak-to-valley distance (APVD) level.
//!
//! For a candidate `f`, peak `n` scores `|X(nf)|` minus the mean of the
//! valleys `|X((n − ½)f)|` and `|X((n + ½)f)|`. `D(f)` averages the first
//! `p` peaks and the estimate is its argmax over a log2 grid.

use crate::error::{Error, Result};
use crate::signal::Window;
use crate::spectral::{argmax, power_spectrum, Spectrum};

use super::{analysis_nfft, check_frame, CandidateSource, EstimatorConfig, PitchCandidate};

/// Peak-to-valley distance of peak `n` for candidate `f`.
pub fn peak_valley_distance(magnitude: &Spectrum, f: f64, n: usize) -> f64 {
    let n = n as f64;
    magnitude.value_at(n * f)
        - 0.5 * (magnitude.value_at((n - 0.5) * f) + magnitude.value_at((n + 0.5) * f))
}

/// `D(f)`: mean peak-to-valley distance over the first `peaks` harmonics.
pub fn apvd(magnitude: &Spectrum, f: f64, peaks: usize) -> f64 {
    let total: f64 = (1..=peaks)
        .map(|n| peak_valley_distance(magnitude, f, n))
        .sum();
    total / peaks as f64
}

/// Candidate frequencies from `f_lo` to `f_hi` spaced `1/bins_per_octave` octave.
pub fn log_grid(f_lo: f64, f_hi: f64, bins_per_octave: usize) -> Vec<f64> {
    let step = 1.0 / bins_per_octave as f64;
    let count = ((f_hi / f_lo).log2() / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| f_lo * (i as f64 * step).exp2())
        .collect()
}

/// Argmax of `D(f)` over `grid`, with the score at every grid point.
pub fn swipe_on_grid(
    magnitude: &Spectrum,
    grid: &[f64],
    peaks: usize,
) -> Option<(usize, Vec<f64>)> {
    let scores: Vec<f64> = grid.iter().map(|&f| apvd(magnitude, f, peaks)).collect();
    argmax(&scores).map(|i| (i, scores))
}

pub fn swipe_estimate(
    frame: &[f64],
    sample_rate_hz: u32,
    cfg: &EstimatorConfig,
) -> Result<PitchCandidate> {
    cfg.validate()?;
    check_frame(frame, sample_rate_hz, cfg.swipe_f_min)?;
    let spectrum = power_spectrum(
        frame,
        sample_rate_hz,
        analysis_nfft(frame.len()),
        Window::Hann,
    )?;
    if spectrum.total() <= 0.0 {
        return Err(Error::DegenerateFrame);
    }
    let magnitude = spectrum.to_magnitude();
    let grid = log_grid(cfg.swipe_f_min, cfg.swipe_f_max, cfg.swipe_bins_per_octave);
    let (best, scores) =
        swipe_on_grid(&magnitude, &grid, cfg.swipe_peaks).ok_or(Error::DegenerateFrame)?;
    Ok(PitchCandidate {
        f0_hz: grid[best],
        salience: scores[best],
        source: CandidateSource::Swipe,
        low_confidence: scores[best] <= 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn grid_spacing() {
        let g = log_grid(50.0, 500.0, 48);
        assert_eq!(g.len(), 160);
        assert!((g[48] - 100.0).abs() < 1e-9);
        assert!(g.iter().all(|&f| (50.0..=500.0).contains(&f)));
    }

    #[test]
    fn pure_tone_first_peak_is_positive() {
        let fs = 8000;
        let f0 = 200.0;
        let x: Vec<f64> = (0..480)
            .map(|i| (2.0 * PI * f0 * i as f64 / fs as f64).sin())
            .collect();
        let s = power_spectrum(&x, fs, 4096, Window::Hann)
            .unwrap()
            .to_magnitude();
        assert!(peak_valley_distance(&s, f0, 1) > 0.0);
    }
}
