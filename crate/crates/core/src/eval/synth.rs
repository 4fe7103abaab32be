//! Source-filter synthesis of vowel-like utterances with known F0.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{centered_frame_count, SampleBuffer};

use super::track::FramePitchTrack;

/// Spacing of the ground-truth track.
pub const TRUTH_HOP_MS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Formant {
    pub freq_hz: f64,
    pub bandwidth_hz: f64,
}

impl Formant {
    pub const fn new(freq_hz: f64, bandwidth_hz: f64) -> Self {
        Self {
            freq_hz,
            bandwidth_hz,
        }
    }
}

/// An /a/-like vowel.
pub const DEFAULT_FORMANTS: [Formant; 3] = [
    Formant::new(700.0, 130.0),
    Formant::new(1220.0, 70.0),
    Formant::new(2600.0, 160.0),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthUtteranceSpec {
    /// Piecewise-linear `(time_ms, f0_hz)` breakpoints; held constant
    /// before the first and after the last.
    pub f0_contour: Vec<(f64, f64)>,
    pub duration_ms: f64,
    pub formants: [Formant; 3],
    /// Standard deviation of the per-period perturbation, in percent.
    pub jitter_pct: f64,
    pub rng_seed: u64,
    pub sample_rate_hz: u32,
}

impl SynthUtteranceSpec {
    /// Constant-pitch vowel with the default formants and no jitter.
    pub fn flat(f0_hz: f64, duration_ms: f64, sample_rate_hz: u32) -> Self {
        Self {
            f0_contour: vec![(0.0, f0_hz)],
            duration_ms,
            formants: DEFAULT_FORMANTS,
            jitter_pct: 0.0,
            rng_seed: 0,
            sample_rate_hz,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.f0_contour.is_empty() {
            return Err(Error::InvalidConfig("f0 contour is empty".into()));
        }
        if let Some(&(_, f)) = self
            .f0_contour
            .iter()
            .find(|(_, f)| !(50.0..=400.0).contains(f))
        {
            return Err(Error::InvalidConfig(format!(
                "contour value {f} Hz outside [50, 400]"
            )));
        }
        if self.f0_contour.windows(2).any(|w| !(w[1].0 >= w[0].0)) {
            return Err(Error::InvalidConfig(
                "contour times must be non-decreasing".into(),
            ));
        }
        if !(self.duration_ms >= 200.0) {
            return Err(Error::InvalidConfig(
                "duration must be at least 200 ms".into(),
            ));
        }
        if !(self.jitter_pct >= 0.0 && self.jitter_pct < 20.0) {
            return Err(Error::InvalidConfig(
                "jitter_pct must lie in [0, 20)".into(),
            ));
        }
        if self.sample_rate_hz < 2000 {
            return Err(Error::InvalidConfig(
                "sample rate must be at least 2 kHz".into(),
            ));
        }
        let nyquist = self.sample_rate_hz as f64 / 2.0;
        for f in &self.formants {
            if !(f.freq_hz > 0.0 && f.freq_hz < nyquist && f.bandwidth_hz > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "formant {} Hz / {} Hz bandwidth invalid at {} Hz sampling",
                    f.freq_hz, f.bandwidth_hz, self.sample_rate_hz
                )));
            }
        }
        Ok(())
    }

    /// Contour value at `t_ms`.
    pub fn f0_at(&self, t_ms: f64) -> f64 {
        let c = &self.f0_contour;
        let i = c.partition_point(|&(t, _)| t <= t_ms);
        if i == 0 {
            return c[0].1;
        }
        if i == c.len() {
            return c[c.len() - 1].1;
        }
        let (t0, f0) = c[i - 1];
        let (t1, f1) = c[i];
        if t1 == t0 {
            return f1;
        }
        f0 + (f1 - f0) * (t_ms - t0) / (t1 - t0)
    }
}

/// Formants of five vowels (/a/, /e/, /i/, /o/, /u/), adult male averages.
pub const VOWELS: [[Formant; 3]; 5] = [
    [
        Formant::new(730.0, 90.0),
        Formant::new(1090.0, 110.0),
        Formant::new(2440.0, 170.0),
    ],
    [
        Formant::new(530.0, 90.0),
        Formant::new(1840.0, 110.0),
        Formant::new(2480.0, 170.0),
    ],
    [
        Formant::new(270.0, 90.0),
        Formant::new(2290.0, 110.0),
        Formant::new(3010.0, 170.0),
    ],
    [
        Formant::new(570.0, 90.0),
        Formant::new(840.0, 110.0),
        Formant::new(2410.0, 170.0),
    ],
    [
        Formant::new(300.0, 90.0),
        Formant::new(870.0, 110.0),
        Formant::new(2240.0, 170.0),
    ],
];

/// Pitch range of the low-voice half of [`synthetic_corpus`].
pub const LOW_VOICE_HZ: (f64, f64) = (75.0, 185.0);
/// Pitch range of the high-voice half of [`synthetic_corpus`].
pub const HIGH_VOICE_HZ: (f64, f64) = (215.0, 380.0);

/// `n_low` utterances whose contour stays within [`LOW_VOICE_HZ`] followed by
/// `n_high` within [`HIGH_VOICE_HZ`]. Each gets a random vowel, a
/// four-point contour, 1 % jitter and a duration of 600–800 ms.
pub fn synthetic_corpus(
    n_low: usize,
    n_high: usize,
    sample_rate_hz: u32,
    seed: u64,
) -> Vec<SynthUtteranceSpec> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_low + n_high)
        .map(|i| {
            let (lo, hi) = if i < n_low {
                LOW_VOICE_HZ
            } else {
                HIGH_VOICE_HZ
            };
            let duration_ms = rng.random_range(600.0..=800.0_f64).round();
            let centre = rng.random_range(lo..=hi);
            let f0_contour = (0..4)
                .map(|j| {
                    let t = duration_ms * j as f64 / 3.0;
                    let f = (centre * rng.random_range(0.85..=1.15)).clamp(lo, hi);
                    (t, f)
                })
                .collect();
            SynthUtteranceSpec {
                f0_contour,
                duration_ms,
                formants: VOWELS[rng.random_range(0..VOWELS.len())],
                jitter_pct: 1.0,
                rng_seed: rng.random(),
                sample_rate_hz,
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SynthUtterance {
    pub audio: SampleBuffer,
    /// Ground truth at 10 ms, every frame voiced.
    pub truth: FramePitchTrack,
    /// Glottal closure instants in seconds.
    pub pulse_times_s: Vec<f64>,
}

/// Pulse instants following `period_at(t)` seconds, each period scaled by
/// `1 + ε` with ε Gaussian (std `jitter`) clamped to ±3 std.
pub(crate) fn pulse_times(
    duration_s: f64,
    jitter: f64,
    rng: &mut ChaCha8Rng,
    mut period_at: impl FnMut(f64) -> f64,
) -> Vec<f64> {
    let normal = (jitter > 0.0).then(|| Normal::new(0.0, jitter).expect("finite jitter"));
    let mut t = 0.0;
    let mut out = Vec::new();
    while t < duration_s {
        out.push(t);
        let eps = normal
            .as_ref()
            .map_or(0.0, |n| n.sample(rng).clamp(-3.0 * jitter, 3.0 * jitter));
        t += period_at(t) * (1.0 + eps);
    }
    out
}

/// Unit impulses at fractional sample positions, split linearly between
/// the two neighbouring samples.
pub(crate) fn impulse_train(times_s: &[f64], len: usize, fs: f64) -> Vec<f64> {
    let mut x = vec![0.0; len];
    for &t in times_s {
        let pos = t * fs;
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        if i < len {
            x[i] += 1.0 - frac;
        }
        if i + 1 < len {
            x[i + 1] += frac;
        }
    }
    x
}

/// One-pole lowpass `y[n] = (1 − a)·x[n] + a·y[n−1]`.
pub(crate) fn one_pole(x: &mut [f64], a: f64) {
    let mut y = 0.0;
    for v in x.iter_mut() {
        y = (1.0 - a) * *v + a * y;
        *v = y;
    }
}

/// Two-pole resonator normalised to unit gain at DC.
pub(crate) fn resonator(x: &mut [f64], freq_hz: f64, bandwidth_hz: f64, fs: f64) {
    let r = (-std::f64::consts::PI * bandwidth_hz / fs).exp();
    let c = -r * r;
    let b = 2.0 * r * (2.0 * std::f64::consts::PI * freq_hz / fs).cos();
    let a = 1.0 - b - c;
    let (mut y1, mut y2) = (0.0, 0.0);
    for v in x.iter_mut() {
        let y = a * *v + b * y1 + c * y2;
        y2 = y1;
        y1 = y;
        *v = y;
    }
}

/// Removes the mean and scales to the given RMS.
pub(crate) fn normalise_rms(x: &mut [f64], rms: f64) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
    let p = (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt();
    if p > 0.0 {
        x.iter_mut().for_each(|v| *v *= rms / p);
    }
}

pub fn synthesize_utterance(spec: &SynthUtteranceSpec) -> Result<SynthUtterance> {
    spec.validate()?;
    let fs = spec.sample_rate_hz as f64;
    let len = (spec.duration_ms * 1e-3 * fs).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let pulses = pulse_times(len as f64 / fs, spec.jitter_pct / 100.0, &mut rng, |t| {
        1.0 / spec.f0_at(t * 1e3)
    });
    let mut x = impulse_train(&pulses, len, fs);
    // Glottal source rolloff, roughly -12 dB/octave above 100 Hz.
    let a = (-2.0 * std::f64::consts::PI * 100.0 / fs).exp();
    one_pole(&mut x, a);
    one_pole(&mut x, a);
    for f in &spec.formants {
        resonator(&mut x, f.freq_hz, f.bandwidth_hz, fs);
    }
    normalise_rms(&mut x, 0.1);
    let audio = SampleBuffer::new(x, spec.sample_rate_hz)?;

    let count = centered_frame_count(len, spec.sample_rate_hz, TRUTH_HOP_MS);
    let times: Vec<f64> = (0..count).map(|q| q as f64 * TRUTH_HOP_MS).collect();
    let f0 = times.iter().map(|&t| Some(spec.f0_at(t))).collect();
    let truth = FramePitchTrack::from_reference(times, f0)?;
    Ok(SynthUtterance {
        audio,
        truth,
        pulse_times_s: pulses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::autocorrelation;

    #[test]
    fn flat_contour_acf_peaks_at_period() {
        let fs = 16000;
        let u = synthesize_utterance(&SynthUtteranceSpec::flat(120.0, 500.0, fs)).unwrap();
        let x = u.audio.samples();
        let r = autocorrelation(x, 300).unwrap();
        let lag = (40..300).max_by(|&a, &b| r[a].total_cmp(&r[b])).unwrap();
        let expected = fs as f64 / 120.0;
        assert!(
            (lag as f64 - expected).abs() <= 1.0,
            "lag {lag}, expected {expected}"
        );
    }

    #[test]
    fn linear_contour_truth_is_linear() {
        let spec = SynthUtteranceSpec {
            f0_contour: vec![(0.0, 200.0), (1000.0, 300.0)],
            ..SynthUtteranceSpec::flat(200.0, 1000.0, 8000)
        };
        let u = synthesize_utterance(&spec).unwrap();
        for (t, f) in u.truth.frame_times_ms.iter().zip(&u.truth.f0_hz) {
            let want = 200.0 + 0.1 * t.min(1000.0);
            assert!((f.unwrap() - want).abs() < 1e-9);
        }
    }

    #[test]
    fn jitter_is_bounded() {
        let spec = SynthUtteranceSpec {
            jitter_pct: 1.0,
            rng_seed: 9,
            ..SynthUtteranceSpec::flat(150.0, 2000.0, 16000)
        };
        let u = synthesize_utterance(&spec).unwrap();
        let nominal = 1.0 / 150.0;
        let devs: Vec<f64> = u
            .pulse_times_s
            .windows(2)
            .map(|w| ((w[1] - w[0]) - nominal).abs() / nominal)
            .collect();
        assert!(devs.iter().all(|&d| d <= 0.03 + 1e-12));
        assert!(devs.iter().any(|&d| d > 0.001));
    }

    #[test]
    fn spec_validation() {
        let mut s = SynthUtteranceSpec::flat(120.0, 500.0, 8000);
        s.duration_ms = 150.0;
        assert!(s.validate().is_err());
        let s = SynthUtteranceSpec::flat(450.0, 500.0, 8000);
        assert!(s.validate().is_err());
    }
}
