//! FFT-based kernels shared by the estimators: power spectra, the analytic
//! signal, autocorrelation and log-frequency resampling.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::signal::Window;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

fn inverse(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

pub fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    Magnitude,
    Power,
}

/// One-sided spectrum from DC to Nyquist.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub bins: Vec<f64>,
    pub bin_hz: f64,
    pub kind: SpectrumKind,
}

impl Spectrum {
    pub fn nyquist_hz(&self) -> f64 {
        (self.bins.len().saturating_sub(1)) as f64 * self.bin_hz
    }

    pub fn total(&self) -> f64 {
        self.bins.iter().sum()
    }

    /// Linearly interpolated value at `freq_hz`; zero outside `[0, nyquist]`.
    pub fn value_at(&self, freq_hz: f64) -> f64 {
        if !(freq_hz >= 0.0) {
            return 0.0;
        }
        let pos = freq_hz / self.bin_hz;
        let i = pos.floor() as usize;
        if i + 1 >= self.bins.len() {
            return if i + 1 == self.bins.len() && pos == i as f64 {
                self.bins[i]
            } else {
                0.0
            };
        }
        let frac = pos - i as f64;
        self.bins[i] * (1.0 - frac) + self.bins[i + 1] * frac
    }

    pub fn to_magnitude(&self) -> Spectrum {
        match self.kind {
            SpectrumKind::Magnitude => self.clone(),
            SpectrumKind::Power => Spectrum {
                bins: self.bins.iter().map(|p| p.sqrt()).collect(),
                bin_hz: self.bin_hz,
                kind: SpectrumKind::Magnitude,
            },
        }
    }

    /// Index of the largest bin.
    pub fn peak_bin(&self) -> usize {
        argmax(&self.bins).unwrap_or(0)
    }
}

pub(crate) fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// One-sided power spectrum of the windowed frame zero-padded to `nfft`.
///
/// Scaled so that the bins sum to the mean power of the windowed frame.
pub fn power_spectrum(
    frame: &[f64],
    sample_rate_hz: u32,
    nfft: usize,
    window: Window,
) -> Result<Spectrum> {
    let n = frame.len();
    if n == 0 || nfft < n || !nfft.is_power_of_two() {
        return Err(Error::InvalidFftSize { nfft, frame_len: n });
    }
    let w = window.coefficients(n);
    let mut buf: Vec<Complex<f64>> = frame
        .iter()
        .zip(&w)
        .map(|(x, w)| Complex::new(x * w, 0.0))
        .collect();
    buf.resize(nfft, Complex::new(0.0, 0.0));
    forward(nfft).process(&mut buf);
    let scale = 1.0 / (nfft as f64 * n as f64);
    let half = nfft / 2;
    let bins = (0..=half)
        .map(|k| {
            let p = buf[k].norm_sqr() * scale;
            if k == 0 || k == half {
                p
            } else {
                2.0 * p
            }
        })
        .collect();
    Ok(Spectrum {
        bins,
        bin_hz: sample_rate_hz as f64 / nfft as f64,
        kind: SpectrumKind::Power,
    })
}

/// `x + j·H{x}` via the frequency-domain method.
pub fn analytic_signal(x: &[f64]) -> Result<Vec<Complex<f64>>> {
    let n = x.len();
    if n == 0 {
        return Err(Error::InvalidBuffer(
            "empty input to analytic_signal".into(),
        ));
    }
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    forward(n).process(&mut buf);
    // Keep DC (and Nyquist for even n), double positive bins, zero negative bins.
    let positive_end = n.div_ceil(2);
    for v in buf.iter_mut().take(positive_end).skip(1) {
        *v *= 2.0;
    }
    let negative_start = if n.is_multiple_of(2) {
        n / 2 + 1
    } else {
        positive_end
    };
    for v in buf.iter_mut().skip(negative_start) {
        *v = Complex::new(0.0, 0.0);
    }
    inverse(n).process(&mut buf);
    let inv = 1.0 / n as f64;
    Ok(buf
        .iter()
        .zip(x)
        .map(|(z, &re)| Complex::new(re, z.im * inv))
        .collect())
}

/// Instantaneous amplitude `|x + j·H{x}|`.
pub fn envelope(x: &[f64]) -> Result<Vec<f64>> {
    Ok(analytic_signal(x)?.iter().map(|z| z.norm()).collect())
}

/// Raw autocorrelation `r(τ) = Σ_t x(t)·x(t+τ)` for `τ = 0..=max_lag`.
pub fn autocorrelation(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if max_lag >= n {
        return Err(Error::LagOutOfRange { max_lag, len: n });
    }
    let m = next_pow2(n + max_lag + 1);
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    buf.resize(m, Complex::new(0.0, 0.0));
    forward(m).process(&mut buf);
    for v in buf.iter_mut() {
        *v = Complex::new(v.norm_sqr(), 0.0);
    }
    inverse(m).process(&mut buf);
    let inv = 1.0 / m as f64;
    Ok(buf[..=max_lag].iter().map(|v| v.re * inv).collect())
}

/// Spectrum resampled on a base-2 logarithmic frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSpectrum {
    pub values: Vec<f64>,
    pub log2_f_start: f64,
    pub step_log2: f64,
}

impl LogSpectrum {
    pub fn log2_freq(&self, i: usize) -> f64 {
        self.log2_f_start + i as f64 * self.step_log2
    }

    pub fn freq_hz(&self, i: usize) -> f64 {
        self.log2_freq(i).exp2()
    }

    /// Linear interpolation at a log2 frequency; `None` outside the grid.
    pub fn value_at_log2(&self, log2_f: f64) -> Option<f64> {
        let pos = (log2_f - self.log2_f_start) / self.step_log2;
        let last = self.values.len().checked_sub(1)?;
        if pos < -1e-9 || pos > last as f64 + 1e-9 {
            return None;
        }
        let pos = pos.clamp(0.0, last as f64);
        let i = (pos.floor() as usize).min(last);
        if i == last {
            return Some(self.values[last]);
        }
        let frac = pos - i as f64;
        Some(self.values[i] * (1.0 - frac) + self.values[i + 1] * frac)
    }
}

/// Resamples `s` onto a log2 grid from `f_lo` to `f_hi` with
/// `bins_per_octave` points per octave, interpolating linearly in frequency.
pub fn to_log_frequency(
    s: &Spectrum,
    f_lo: f64,
    f_hi: f64,
    bins_per_octave: usize,
) -> Result<LogSpectrum> {
    let nyquist = s.nyquist_hz();
    if !(f_lo > 0.0 && f_lo < f_hi && f_hi <= nyquist * (1.0 + 1e-12)) {
        return Err(Error::FrequencyBounds {
            lo: f_lo,
            hi: f_hi,
            nyquist,
        });
    }
    if bins_per_octave == 0 {
        return Err(Error::InvalidConfig(
            "bins_per_octave must be positive".into(),
        ));
    }
    let step = 1.0 / bins_per_octave as f64;
    let start = f_lo.log2();
    let count = ((f_hi.log2() - start) / step + 1e-9).floor() as usize + 1;
    let values = (0..count)
        .map(|i| s.value_at((start + i as f64 * step).exp2().min(nyquist)))
        .collect();
    Ok(LogSpectrum {
        values,
        log2_f_start: start,
        step_log2: step,
    })
}
