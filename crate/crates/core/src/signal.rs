//! Audio buffers, WAV I/O, framing and noise corruption at a target SNR.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniformly sampled mono signal, full scale ±1.0.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBuffer {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl SampleBuffer {
    /// Builds a buffer, rejecting empty input, a zero rate or non-finite samples.
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if sample_rate_hz == 0 {
            return Err(Error::InvalidBuffer("sample rate must be positive".into()));
        }
        if samples.is_empty() {
            return Err(Error::InvalidBuffer("no samples".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidBuffer(format!(
                "non-finite sample at index {i}"
            )));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_ms(&self) -> f64 {
        self.samples.len() as f64 * 1000.0 / self.sample_rate_hz as f64
    }

    /// Mean of squared samples.
    pub fn power(&self) -> f64 {
        mean_power(&self.samples)
    }

    /// Population standard deviation.
    pub fn std_dev(&self) -> f64 {
        let n = self.samples.len() as f64;
        let mean = self.samples.iter().sum::<f64>() / n;
        (self.samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n).sqrt()
    }

    /// Returns a copy with every sample multiplied by `gain`.
    pub fn scaled(&self, gain: f64) -> Result<Self> {
        Self::new(
            self.samples.iter().map(|s| s * gain).collect(),
            self.sample_rate_hz,
        )
    }

    /// Returns a copy padded with `before` and `after` zeros.
    pub fn zero_padded(&self, before: usize, after: usize) -> Self {
        let mut samples = vec![0.0; before];
        samples.extend_from_slice(&self.samples);
        samples.resize(samples.len() + after, 0.0);
        Self {
            samples,
            sample_rate_hz: self.sample_rate_hz,
        }
    }

    pub fn ms_to_samples(&self, ms: f64) -> usize {
        ms_to_samples(ms, self.sample_rate_hz)
    }
}

pub(crate) fn ms_to_samples(ms: f64, sample_rate_hz: u32) -> usize {
    (ms * sample_rate_hz as f64 / 1000.0).round() as usize
}

pub(crate) fn mean_power(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|s| s * s).sum::<f64>() / x.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Rectangular,
    #[default]
    Hann,
}

impl Window {
    /// Window coefficients of length `n` (periodic=false, symmetric Hann).
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; n],
            Window::Hann => {
                if n == 1 {
                    return vec![1.0];
                }
                (0..n)
                    .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos())
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameSpec {
    pub frame_len_ms: f64,
    pub hop_ms: f64,
    pub window: Window,
}

impl Default for FrameSpec {
    fn default() -> Self {
        Self {
            frame_len_ms: 90.0,
            hop_ms: 10.0,
            window: Window::Hann,
        }
    }
}

impl FrameSpec {
    pub fn new(frame_len_ms: f64, hop_ms: f64, window: Window) -> Result<Self> {
        let spec = Self {
            frame_len_ms,
            hop_ms,
            window,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frame_len_ms > 0.0 && self.hop_ms > 0.0) {
            return Err(Error::InvalidConfig(
                "frame length and hop must be positive".into(),
            ));
        }
        if self.hop_ms > self.frame_len_ms {
            return Err(Error::InvalidConfig(format!(
                "hop {} ms exceeds frame length {} ms",
                self.hop_ms, self.frame_len_ms
            )));
        }
        Ok(())
    }

    /// Number of full frames that fit in `len` samples at `sample_rate_hz`.
    pub fn frame_count(&self, len: usize, sample_rate_hz: u32) -> usize {
        let n = ms_to_samples(self.frame_len_ms, sample_rate_hz);
        let hop = ms_to_samples(self.hop_ms, sample_rate_hz).max(1);
        if len < n || n == 0 {
            0
        } else {
            (len - n) / hop + 1
        }
    }
}

/// One analysis frame borrowed from a buffer.
#[derive(Debug, Clone, Copy)]
pub struct Frame<'a> {
    pub samples: &'a [f64],
    pub sample_rate_hz: u32,
    pub start_ms: f64,
}

impl Frame<'_> {
    pub fn to_buffer(&self) -> Result<SampleBuffer> {
        SampleBuffer::new(self.samples.to_vec(), self.sample_rate_hz)
    }
}

/// Splits `buf` into frames at `hop_ms` spacing. A trailing partial frame is dropped.
pub fn frame_signal<'a>(buf: &'a SampleBuffer, spec: &FrameSpec) -> Result<Vec<Frame<'a>>> {
    spec.validate()?;
    let fs = buf.sample_rate_hz();
    let n = ms_to_samples(spec.frame_len_ms, fs);
    let hop = ms_to_samples(spec.hop_ms, fs).max(1);
    if n == 0 || buf.len() < n {
        return Err(Error::BufferTooShort {
            len_ms: buf.duration_ms(),
            frame_ms: spec.frame_len_ms,
        });
    }
    let count = (buf.len() - n) / hop + 1;
    Ok((0..count)
        .map(|i| {
            let start = i * hop;
            Frame {
                samples: &buf.samples()[start..start + n],
                sample_rate_hz: fs,
                start_ms: start as f64 * 1000.0 / fs as f64,
            }
        })
        .collect())
}

/// Number of points on a centred analysis grid: one per hop from t = 0 up
/// to the last sample of a buffer of `len` samples.
pub fn centered_frame_count(len: usize, sample_rate_hz: u32, hop_ms: f64) -> usize {
    let hop = ms_to_samples(hop_ms, sample_rate_hz).max(1);
    if len == 0 {
        0
    } else {
        (len - 1) / hop + 1
    }
}

/// Frames centred on `q * hop_ms`, zero-padded at both ends so that every
/// grid point from t = 0 to the end of the buffer has a full frame.
#[derive(Debug, Clone)]
pub struct CenteredFrames {
    padded: Vec<f64>,
    frame_len: usize,
    hop: usize,
    count: usize,
    hop_ms: f64,
    sample_rate_hz: u32,
}

impl CenteredFrames {
    pub fn new(samples: &[f64], sample_rate_hz: u32, frame_len_ms: f64, hop_ms: f64) -> Self {
        let frame_len = ms_to_samples(frame_len_ms, sample_rate_hz).max(1);
        let hop = ms_to_samples(hop_ms, sample_rate_hz).max(1);
        let half = frame_len / 2;
        let count = centered_frame_count(samples.len(), sample_rate_hz, hop_ms);
        let mut padded = vec![0.0; half];
        padded.extend_from_slice(samples);
        padded.resize(half + count.saturating_sub(1) * hop + frame_len, 0.0);
        Self {
            padded,
            frame_len,
            hop,
            count,
            hop_ms,
            sample_rate_hz,
        }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn frame(&self, q: usize) -> &[f64] {
        let start = q * self.hop;
        &self.padded[start..start + self.frame_len]
    }

    /// Centre time of frame `q` in milliseconds.
    pub fn time_ms(&self, q: usize) -> f64 {
        q as f64 * self.hop_ms
    }
}

/// Reads a RIFF/WAVE file (16-bit PCM or 32-bit float, mono or stereo).
pub fn load_wav(path: impl AsRef<Path>) -> Result<SampleBuffer> {
    let path = path.as_ref();
    let reader = hound::WavReader::open(path).map_err(|e| Error::Unreadable {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 || channels > 2 {
        return Err(Error::UnsupportedEncoding(format!("{channels} channels")));
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .into_samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<_, _>>(),
        (hound::SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<std::result::Result<_, _>>(),
        (fmt, bits) => {
            return Err(Error::UnsupportedEncoding(format!("{bits}-bit {fmt:?}")));
        }
    }
    .map_err(|e| Error::Unreadable {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    if interleaved.is_empty() {
        return Err(Error::ZeroLengthAudio);
    }
    let samples = if channels == 2 {
        interleaved
            .chunks_exact(2)
            .map(|c| 0.5 * (c[0] + c[1]))
            .collect()
    } else {
        interleaved
    };
    if samples.is_empty() {
        return Err(Error::ZeroLengthAudio);
    }
    SampleBuffer::new(samples, spec.sample_rate)
}

/// Writes a mono 16-bit PCM WAV, clipping to full scale.
pub fn write_wav_pcm16(path: impl AsRef<Path>, buf: &SampleBuffer) -> Result<()> {
    let path = path.as_ref();
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: buf.sample_rate_hz(),
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let write_err = |e: hound::Error| Error::WriteFailed {
        path: path.to_path_buf(),
        reason: e.to_string(),
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(write_err)?;
    for &s in buf.samples() {
        let v = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        writer.write_sample(v).map_err(write_err)?;
    }
    writer.finalize().map_err(write_err)
}

/// Writes equal-length channels as an interleaved 32-bit float WAV.
pub fn write_wav_f32_multichannel(
    path: impl AsRef<Path>,
    channels: &[&[f64]],
    sample_rate_hz: u32,
) -> Result<()> {
    let path = path.as_ref();
    if channels.is_empty() || channels.len() > u16::MAX as usize {
        return Err(Error::InvalidBuffer(format!(
            "cannot write {} channels",
            channels.len()
        )));
    }
    let len = channels[0].len();
    if channels.iter().any(|c| c.len() != len) {
        return Err(Error::InvalidBuffer("channels differ in length".into()));
    }
    let spec = hound::WavSpec {
        channels: channels.len() as u16,
        sample_rate: sample_rate_hz,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let write_err = |e: hound::Error| Error::WriteFailed {
        path: path.to_path_buf(),
        reason: e.to_string(),
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(write_err)?;
    for i in 0..len {
        for c in channels {
            writer.write_sample(c[i] as f32).map_err(write_err)?;
        }
    }
    writer.finalize().map_err(write_err)
}

fn bessel_i0(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let half = x / 2.0;
    for k in 1..64 {
        term *= (half / k as f64).powi(2);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Kaiser-windowed sinc resampler.
///
/// The passband edge sits at 0.45 of the lower of the two sample rates and
/// the stopband starts at its Nyquist frequency, giving better than 60 dB
/// of alias rejection with the default kernel.
pub fn resample(buf: &SampleBuffer, target_rate_hz: u32) -> Result<SampleBuffer> {
    if target_rate_hz == 0 {
        return Err(Error::InvalidConfig(
            "target sample rate must be positive".into(),
        ));
    }
    let src_rate = buf.sample_rate_hz() as f64;
    let dst_rate = target_rate_hz as f64;
    if buf.sample_rate_hz() == target_rate_hz {
        return Ok(buf.clone());
    }
    const ZERO_CROSSINGS: f64 = 32.0;
    const BETA: f64 = 8.6;
    // Normalized cutoff relative to the source rate.
    let cutoff = 0.475 * src_rate.min(dst_rate) / src_rate;
    let half_width = ZERO_CROSSINGS / (2.0 * cutoff);
    let i0_beta = bessel_i0(BETA);
    let x = buf.samples();
    let out_len = ((x.len() as f64) * dst_rate / src_rate).round().max(1.0) as usize;
    let step = src_rate / dst_rate;
    let out: Vec<f64> = (0..out_len)
        .map(|j| {
            let center = j as f64 * step;
            let lo = (center - half_width).ceil().max(0.0) as usize;
            let hi = ((center + half_width).floor() as usize).min(x.len() - 1);
            let mut acc = 0.0;
            for (i, &xi) in x.iter().enumerate().take(hi + 1).skip(lo) {
                let t = i as f64 - center;
                let r = t / half_width;
                if r.abs() > 1.0 {
                    continue;
                }
                let w = bessel_i0(BETA * (1.0 - r * r).sqrt()) / i0_beta;
                let arg = 2.0 * cutoff * t;
                let sinc = if arg.abs() < 1e-12 {
                    1.0
                } else {
                    (PI * arg).sin() / (PI * arg)
                };
                acc += xi * 2.0 * cutoff * sinc * w;
            }
            acc
        })
        .collect();
    SampleBuffer::new(out, target_rate_hz)
}

/// A clean signal, a noise recording and the requested mixing SNR.
#[derive(Debug, Clone)]
pub struct NoisyMix {
    pub clean: SampleBuffer,
    pub noise: SampleBuffer,
    pub snr_db: f64,
    pub seed: u64,
}

/// Result of a mix: the noisy signal plus the gain and offset that produced it.
#[derive(Debug, Clone)]
pub struct MixOutput {
    pub mixed: SampleBuffer,
    pub gain: f64,
    pub noise_offset: usize,
}

/// Gain applied to noise of power `noise_power` so that the mix reaches `snr_db`.
pub fn snr_gain(clean_power: f64, noise_power: f64, snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 20.0) * (clean_power / noise_power).sqrt()
}

/// Adds noise to `mix.clean` so the clean-to-noise power ratio over the
/// whole utterance equals `mix.snr_db`. The noise is read circularly from a
/// seed-derived offset; noise at another rate is resampled first.
pub fn mix_at_snr(mix: &NoisyMix) -> Result<SampleBuffer> {
    mix_at_snr_detailed(mix).map(|m| m.mixed)
}

pub fn mix_at_snr_detailed(mix: &NoisyMix) -> Result<MixOutput> {
    if !mix.snr_db.is_finite() {
        return Err(Error::InvalidConfig(format!("SNR {} dB", mix.snr_db)));
    }
    let clean = &mix.clean;
    let clean_power = clean.power();
    if clean_power <= 0.0 {
        return Err(Error::SnrUndefined);
    }
    let resampled;
    let noise = if mix.noise.sample_rate_hz() != clean.sample_rate_hz() {
        resampled = resample(&mix.noise, clean.sample_rate_hz())?;
        &resampled
    } else {
        &mix.noise
    };
    if noise.len() < clean.len() {
        return Err(Error::NoiseTooShort {
            needed: clean.len(),
            available: noise.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix.seed);
    let offset = rng.random_range(0..noise.len());
    let ns = noise.samples();
    let segment: Vec<f64> = (0..clean.len())
        .map(|i| ns[(offset + i) % ns.len()])
        .collect();
    let noise_power = mean_power(&segment);
    if noise_power <= 0.0 {
        return Err(Error::InvalidBuffer("noise segment has zero power".into()));
    }
    let gain = snr_gain(clean_power, noise_power, mix.snr_db);
    let mixed = clean
        .samples()
        .iter()
        .zip(&segment)
        .map(|(c, n)| c + gain * n)
        .collect();
    Ok(MixOutput {
        mixed: SampleBuffer::new(mixed, clean.sample_rate_hz())?,
        gain,
        noise_offset: offset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(freq: f64, fs: u32, len: usize, amp: f64) -> SampleBuffer {
        SampleBuffer::new(
            (0..len)
                .map(|i| amp * (2.0 * PI * freq * i as f64 / fs as f64).sin())
                .collect(),
            fs,
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_buffers() {
        assert!(SampleBuffer::new(vec![], 16000).is_err());
        assert!(SampleBuffer::new(vec![0.0], 0).is_err());
        assert!(SampleBuffer::new(vec![0.0, f64::NAN], 8000).is_err());
    }

    #[test]
    fn frame_counts() {
        let spec = FrameSpec::default();
        let buf = SampleBuffer::new(vec![0.1; 16000], 16000).unwrap();
        assert_eq!(frame_signal(&buf, &spec).unwrap().len(), 92);
        let buf = SampleBuffer::new(vec![0.1; 1440], 16000).unwrap();
        assert_eq!(frame_signal(&buf, &spec).unwrap().len(), 1);
        let buf = SampleBuffer::new(vec![0.1; 800], 16000).unwrap();
        assert!(matches!(
            frame_signal(&buf, &spec),
            Err(Error::BufferTooShort { .. })
        ));
    }

    #[test]
    fn frame_start_times() {
        let spec = FrameSpec::new(25.0, 10.0, Window::Rectangular).unwrap();
        let buf = SampleBuffer::new(vec![0.0; 8000], 8000).unwrap();
        let frames = frame_signal(&buf, &spec).unwrap();
        assert_eq!(frames[3].start_ms, 30.0);
        assert_eq!(frames[3].samples.len(), 200);
    }

    #[test]
    fn hop_longer_than_frame_is_rejected() {
        assert!(FrameSpec::new(10.0, 20.0, Window::Hann).is_err());
    }

    #[test]
    fn equal_power_mix_has_unit_gain() {
        let clean = tone(100.0, 8000, 8000, 1.0);
        let noise = tone(333.0, 8000, 8000, 1.0);
        let out = mix_at_snr_detailed(&NoisyMix {
            clean: clean.clone(),
            noise: noise.clone(),
            snr_db: 0.0,
            seed: 3,
        })
        .unwrap();
        // Circular shift changes the segment power only through the partial cycle.
        assert!((out.gain - 1.0).abs() < 1e-3, "gain {}", out.gain);
    }

    #[test]
    fn minus_fifteen_db_gain() {
        let g = snr_gain(1.0, 1.0, -15.0);
        assert!((g - 5.623413251903491).abs() < 1e-12);
    }

    #[test]
    fn silent_clean_is_an_error() {
        let clean = SampleBuffer::new(vec![0.0; 100], 8000).unwrap();
        let noise = tone(100.0, 8000, 100, 1.0);
        let r = mix_at_snr(&NoisyMix {
            clean,
            noise,
            snr_db: 0.0,
            seed: 0,
        });
        assert!(matches!(r, Err(Error::SnrUndefined)));
    }

    #[test]
    fn short_noise_is_an_error() {
        let clean = tone(100.0, 8000, 200, 1.0);
        let noise = tone(100.0, 8000, 100, 1.0);
        let r = mix_at_snr(&NoisyMix {
            clean,
            noise,
            snr_db: 0.0,
            seed: 0,
        });
        assert!(matches!(r, Err(Error::NoiseTooShort { .. })));
    }

    #[test]
    fn resample_preserves_in_band_tone() {
        let x = tone(440.0, 20000, 20000, 0.5);
        let y = resample(&x, 16000).unwrap();
        assert_eq!(y.len(), 16000);
        let reference = tone(440.0, 16000, 16000, 0.5);
        let interior = 1000..15000;
        let err: f64 = interior
            .clone()
            .map(|i| (y.samples()[i] - reference.samples()[i]).powi(2))
            .sum::<f64>()
            / interior.len() as f64;
        assert!(err / reference.power() < 1e-6, "relative error {err}");
    }

    #[test]
    fn resample_rejects_aliases_by_60db() {
        // 9.5 kHz at 20 kHz lies above the 8 kHz Nyquist of the target rate.
        let x = tone(9500.0, 20000, 20000, 1.0);
        let y = resample(&x, 16000).unwrap();
        let interior = &y.samples()[1000..15000];
        let ratio_db = 10.0 * (mean_power(interior) / x.power()).log10();
        assert!(ratio_db < -60.0, "alias level {ratio_db} dB");
    }
}
