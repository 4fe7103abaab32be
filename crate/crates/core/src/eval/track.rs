use std::path::Path;

use crate::error::{Error, Result};

/// Per-frame F0 values on a fixed time grid. `None` is the no-estimate
/// sentinel (written as 0 in files).
#[derive(Debug, Clone, PartialEq)]
pub struct FramePitchTrack {
    pub frame_times_ms: Vec<f64>,
    pub f0_hz: Vec<Option<f64>>,
    pub voiced_mask: Vec<bool>,
}

impl FramePitchTrack {
    pub fn new(
        frame_times_ms: Vec<f64>,
        f0_hz: Vec<Option<f64>>,
        voiced_mask: Vec<bool>,
    ) -> Result<Self> {
        if frame_times_ms.len() != f0_hz.len() || f0_hz.len() != voiced_mask.len() {
            return Err(Error::TrackMismatch(frame_times_ms.len(), f0_hz.len()));
        }
        if let Some(bad) = f0_hz
            .iter()
            .flatten()
            .find(|f| !(**f > 0.0) || !f.is_finite())
        {
            return Err(Error::NonPositiveF0(*bad));
        }
        Ok(Self {
            frame_times_ms,
            f0_hz,
            voiced_mask,
        })
    }

    /// Reference-style track: voiced exactly where an F0 is given.
    pub fn from_reference(frame_times_ms: Vec<f64>, f0_hz: Vec<Option<f64>>) -> Result<Self> {
        let voiced = f0_hz.iter().map(Option::is_some).collect();
        Self::new(frame_times_ms, f0_hz, voiced)
    }

    pub fn len(&self) -> usize {
        self.f0_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f0_hz.is_empty()
    }

    pub fn voiced_count(&self) -> usize {
        self.voiced_mask.iter().filter(|&&v| v).count()
    }

    /// Reads "time_ms f0_hz" lines (0 = unvoiced); `#` starts a comment.
    pub fn read_reference(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut times = Vec::new();
        let mut f0 = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|v| v.parse::<f64>().ok())
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        Error::Manifest(format!(
                            "{}:{}: expected 'time_ms f0_hz'",
                            path.display(),
                            lineno + 1
                        ))
                    })
            };
            let t = parse(parts.next())?;
            let f = parse(parts.next())?;
            if f < 0.0 {
                return Err(Error::NonPositiveF0(f));
            }
            times.push(t);
            f0.push((f > 0.0).then_some(f));
        }
        Self::from_reference(times, f0)
    }

    /// Writes "time_ms f0_hz" lines, 0 for frames without an estimate.
    pub fn write_reference(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = String::new();
        for (t, f) in self.frame_times_ms.iter().zip(&self.f0_hz) {
            out.push_str(&format!("{t:.1} {:.4}\n", f.unwrap_or(0.0)));
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    /// Re-grids the track onto `times_ms`, taking the nearest frame within
    /// `tolerance_ms`; grid points with no such frame are unvoiced.
    pub fn align_to(&self, times_ms: &[f64], tolerance_ms: f64) -> FramePitchTrack {
        let idx = align_nearest(&self.frame_times_ms, times_ms, tolerance_ms);
        let f0 = idx.iter().map(|i| i.and_then(|i| self.f0_hz[i])).collect();
        let voiced = idx
            .iter()
            .map(|i| i.is_some_and(|i| self.voiced_mask[i]))
            .collect();
        FramePitchTrack {
            frame_times_ms: times_ms.to_vec(),
            f0_hz: f0,
            voiced_mask: voiced,
        }
    }
}

/// For each target time, the index of the nearest source time within
/// `tolerance_ms` (source times must be sorted).
pub fn align_nearest(
    source_ms: &[f64],
    target_ms: &[f64],
    tolerance_ms: f64,
) -> Vec<Option<usize>> {
    target_ms
        .iter()
        .map(|&t| {
            let pos = source_ms.partition_point(|&s| s < t);
            let mut best: Option<(usize, f64)> = None;
            for i in [pos.wrapping_sub(1), pos] {
                if let Some(&s) = source_ms.get(i) {
                    let d = (s - t).abs();
                    if d <= tolerance_ms && best.is_none_or(|(_, bd)| d < bd) {
                        best = Some((i, d));
                    }
                }
            }
            best.map(|(i, _)| i)
        })
        .collect()
}
