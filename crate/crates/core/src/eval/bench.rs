//! Benchmark grid: utterances × noises × SNRs × estimators × {raw, pro}.
//!
//! Each (utterance, noise, SNR) triple is one job: the mix is analysed once
//! with every requested estimator and scored for both methods. Jobs run on
//! the current rayon pool and results are merged by key, so the output does
//! not depend on scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::pro::{analysis_times, analyze_utterance, analyze_with_voicing, PipelineConfig};
use crate::signal::{mix_at_snr, NoisyMix, SampleBuffer};

use super::metrics::{
    gated_frame_count, gross_error, mean_absolute_error, separation_error, VoicingGate,
};
use super::noise::{generate_noise, NoiseKind};
use super::track::FramePitchTrack;

/// Column header of the aggregated CSV.
pub const CSV_HEADER: &str =
    "noise,snr_db,estimator,method,ge_percent,mae_hz,sep_error_percent,frames";

/// SNRs of the standard grid, in dB.
pub const DEFAULT_SNRS_DB: [f64; 5] = [-15.0, -10.0, -5.0, 0.0, 5.0];

/// A clean utterance with its reference pitch track.
#[derive(Debug, Clone)]
pub struct Utterance {
    pub name: String,
    pub audio: SampleBuffer,
    pub truth: FramePitchTrack,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Raw,
    Pro,
}

impl Method {
    pub const BOTH: [Method; 2] = [Method::Raw, Method::Pro];

    pub fn name(self) -> &'static str {
        match self {
            Method::Raw => "raw",
            Method::Pro => "pro",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "raw" => Ok(Method::Raw),
            "pro" => Ok(Method::Pro),
            other => Err(Error::InvalidConfig(format!("unknown method '{other}'"))),
        }
    }
}

/// Where the frames fed to the estimators come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VoicingSource {
    /// The zero-crossing/energy detector.
    #[default]
    Detected,
    /// The reference track's voicing.
    Reference,
}

/// A noise condition: generated on the fly or read from a recording.
#[derive(Debug, Clone)]
pub enum NoiseSource {
    Synthetic(NoiseKind),
    Recording { name: String, audio: SampleBuffer },
}

impl NoiseSource {
    pub fn name(&self) -> &str {
        match self {
            NoiseSource::Synthetic(k) => k.name(),
            NoiseSource::Recording { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub snrs_db: Vec<f64>,
    pub estimators: Vec<EstimatorKind>,
    pub methods: Vec<Method>,
    pub gate: VoicingGate,
    pub voicing: VoicingSource,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            snrs_db: DEFAULT_SNRS_DB.to_vec(),
            estimators: vec![EstimatorKind::Shr, EstimatorKind::Swipe, EstimatorKind::Hht],
            methods: Method::BOTH.to_vec(),
            gate: VoicingGate::default(),
            voicing: VoicingSource::default(),
            seed: 0,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.snrs_db.is_empty() || self.estimators.is_empty() || self.methods.is_empty() {
            return Err(Error::InvalidConfig(
                "benchmark grid has an empty axis".into(),
            ));
        }
        if let Some(s) = self.snrs_db.iter().find(|s| !s.is_finite()) {
            return Err(Error::InvalidConfig(format!("SNR {s} dB")));
        }
        Ok(())
    }
}

/// Scores of one utterance in one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UtteranceReport {
    pub noise: String,
    pub snr_db: f64,
    pub estimator: EstimatorKind,
    pub method: Method,
    pub utterance: String,
    pub ge_percent: f64,
    /// Frames in the GE denominator.
    pub frames: usize,
    pub mae_hz: Option<f64>,
    /// Frames that entered the MAE.
    pub mae_frames: usize,
    /// Only for the PRO method.
    pub sep_error_percent: Option<f64>,
    pub sep_frames: usize,
}

/// A unit of the grid that could not be scored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchFailure {
    pub noise: String,
    pub snr_db: f64,
    pub estimator: EstimatorKind,
    pub method: Method,
    pub utterance: String,
    pub message: String,
}

/// Frame-pooled scores of one (noise, SNR, estimator, method) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub noise: String,
    pub snr_db: f64,
    pub estimator: EstimatorKind,
    pub method: Method,
    pub ge_percent: f64,
    pub mae_hz: Option<f64>,
    pub sep_error_percent: Option<f64>,
    pub frames_scored: usize,
}

#[derive(Debug, Clone, Default)]
pub struct BenchOutcome {
    pub rows: Vec<UtteranceReport>,
    pub failures: Vec<BenchFailure>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix(seed), |acc, &p| splitmix(acc ^ p))
}

struct Job<'a> {
    utterance: &'a Utterance,
    u: usize,
    noise: &'a NoiseSource,
    n: usize,
    snr_db: f64,
    s: usize,
}

fn noise_for(job: &Job, seed: u64) -> Result<SampleBuffer> {
    let audio = &job.utterance.audio;
    match job.noise {
        NoiseSource::Synthetic(kind) => generate_noise(
            *kind,
            2 * audio.len(),
            audio.sample_rate_hz(),
            derive_seed(seed, &[1, job.u as u64, job.n as u64]),
        ),
        NoiseSource::Recording { audio, .. } => Ok(audio.clone()),
    }
}

fn score(
    job: &Job,
    kind: EstimatorKind,
    method: Method,
    analysis: &crate::pro::UtteranceAnalysis,
    truth: &FramePitchTrack,
    cfg: &BenchConfig,
    gamma: f64,
) -> Result<UtteranceReport> {
    let est = analysis
        .track(kind, method == Method::Pro)
        .ok_or_else(|| Error::InvalidConfig(format!("estimator {kind} was not run")))?;
    let ge = gross_error(&est, truth, cfg.gate)?;
    let frames = gated_frame_count(&est, truth, cfg.gate);
    let mae_frames = (0..est.len())
        .filter(|&q| est.f0_hz[q].is_some() && gated_frame(&est, truth, cfg.gate, q))
        .count();
    let mae = match mean_absolute_error(&est, truth, cfg.gate) {
        Ok(m) => Some(m),
        Err(Error::NoScoredFrames) => None,
        Err(e) => return Err(e),
    };
    let (sep, sep_frames) = match (method, &analysis.regions) {
        (Method::Pro, Some(regions)) => (
            Some(separation_error(regions, truth, gamma)?),
            truth.voiced_count(),
        ),
        (Method::Pro, None) => {
            return Err(Error::InvalidConfig(
                "decomposition has too few modes for PRO".into(),
            ))
        }
        (Method::Raw, _) => (None, 0),
    };
    Ok(UtteranceReport {
        noise: job.noise.name().to_string(),
        snr_db: job.snr_db,
        estimator: kind,
        method,
        utterance: job.utterance.name.clone(),
        ge_percent: ge,
        frames,
        mae_hz: mae,
        mae_frames,
        sep_error_percent: sep,
        sep_frames,
    })
}

fn gated_frame(
    est: &FramePitchTrack,
    truth: &FramePitchTrack,
    gate: VoicingGate,
    q: usize,
) -> bool {
    truth.voiced_mask[q]
        && truth.f0_hz[q].is_some()
        && match gate {
            VoicingGate::RefVoiced => true,
            VoicingGate::DetectedVoiced => est.voiced_mask[q],
        }
}

fn run_job(
    job: &Job,
    pipeline: &PipelineConfig,
    cfg: &BenchConfig,
) -> Vec<std::result::Result<UtteranceReport, BenchFailure>> {
    let fail = |kind: EstimatorKind, method: Method, e: &Error| BenchFailure {
        noise: job.noise.name().to_string(),
        snr_db: job.snr_db,
        estimator: kind,
        method,
        utterance: job.utterance.name.clone(),
        message: e.to_string(),
    };
    let prepared = (|| {
        let noise = noise_for(job, cfg.seed)?;
        let noisy = mix_at_snr(&NoisyMix {
            clean: job.utterance.audio.clone(),
            noise,
            snr_db: job.snr_db,
            seed: derive_seed(cfg.seed, &[2, job.u as u64, job.n as u64, job.s as u64]),
        })?;
        let times = analysis_times(&noisy, pipeline);
        let truth = job
            .utterance
            .truth
            .align_to(&times, 0.5 * pipeline.pro.frame.hop_ms);
        let analysis = match cfg.voicing {
            VoicingSource::Detected => analyze_utterance(&noisy, &cfg.estimators, pipeline)?,
            VoicingSource::Reference => {
                analyze_with_voicing(&noisy, &cfg.estimators, pipeline, truth.voiced_mask.clone())?
            }
        };
        Ok::<_, Error>((analysis, truth))
    })();
    let mut out = Vec::new();
    for &kind in &cfg.estimators {
        for &method in &cfg.methods {
            out.push(match &prepared {
                Ok((analysis, truth)) => {
                    score(job, kind, method, analysis, truth, cfg, pipeline.pro.gamma)
                        .map_err(|e| fail(kind, method, &e))
                }
                Err(e) => Err(fail(kind, method, e)),
            });
        }
    }
    out
}

/// Evaluates the full grid. Per-unit failures are collected, not fatal;
/// `rows.len() + failures.len()` always equals the grid size.
pub fn run_benchmark(
    corpus: &[Utterance],
    noises: &[NoiseSource],
    pipeline: &PipelineConfig,
    cfg: &BenchConfig,
) -> Result<BenchOutcome> {
    cfg.validate()?;
    pipeline.validate()?;
    if corpus.is_empty() || noises.is_empty() {
        return Err(Error::InvalidConfig(
            "benchmark grid has an empty axis".into(),
        ));
    }
    let mut jobs = Vec::new();
    for (u, utterance) in corpus.iter().enumerate() {
        for (n, noise) in noises.iter().enumerate() {
            for (s, &snr_db) in cfg.snrs_db.iter().enumerate() {
                jobs.push(Job {
                    utterance,
                    u,
                    noise,
                    n,
                    snr_db,
                    s,
                });
            }
        }
    }
    let results: Vec<_> = jobs
        .par_iter()
        .map(|job| run_job(job, pipeline, cfg))
        .collect();
    let mut outcome = BenchOutcome::default();
    for r in results.into_iter().flatten() {
        match r {
            Ok(row) => outcome.rows.push(row),
            Err(f) => outcome.failures.push(f),
        }
    }
    Ok(outcome)
}

/// Pools utterance rows into one report per cell, weighting each utterance
/// by its scored frame counts. Cells follow the order of `noises`, then
/// `cfg.snrs_db`, `cfg.estimators` and `cfg.methods`.
pub fn aggregate(
    rows: &[UtteranceReport],
    noises: &[NoiseSource],
    cfg: &BenchConfig,
) -> Vec<EvalReport> {
    #[derive(Default)]
    struct Acc {
        ge: f64,
        frames: usize,
        mae: f64,
        mae_frames: usize,
        sep: f64,
        sep_frames: usize,
    }
    let key = |noise: &str,
               snr: f64,
               e: EstimatorKind,
               m: Method|
     -> Option<(usize, usize, usize, usize)> {
        Some((
            noises.iter().position(|n| n.name() == noise)?,
            cfg.snrs_db.iter().position(|&s| s == snr)?,
            cfg.estimators.iter().position(|&x| x == e)?,
            cfg.methods.iter().position(|&x| x == m)?,
        ))
    };
    let mut cells: BTreeMap<(usize, usize, usize, usize), Acc> = BTreeMap::new();
    for r in rows {
        let Some(k) = key(&r.noise, r.snr_db, r.estimator, r.method) else {
            continue;
        };
        let acc = cells.entry(k).or_default();
        acc.ge += r.ge_percent * r.frames as f64;
        acc.frames += r.frames;
        if let Some(m) = r.mae_hz {
            acc.mae += m * r.mae_frames as f64;
            acc.mae_frames += r.mae_frames;
        }
        if let Some(s) = r.sep_error_percent {
            acc.sep += s * r.sep_frames as f64;
            acc.sep_frames += r.sep_frames;
        }
    }
    cells
        .into_iter()
        .filter(|(_, a)| a.frames > 0)
        .map(|((n, s, e, m), a)| EvalReport {
            noise: noises[n].name().to_string(),
            snr_db: cfg.snrs_db[s],
            estimator: cfg.estimators[e],
            method: cfg.methods[m],
            ge_percent: a.ge / a.frames as f64,
            mae_hz: (a.mae_frames > 0).then(|| a.mae / a.mae_frames as f64),
            sep_error_percent: (a.sep_frames > 0).then(|| a.sep / a.sep_frames as f64),
            frames_scored: a.frames,
        })
        .collect()
}

/// Writes reports under [`CSV_HEADER`]. Missing values are empty fields.
pub fn write_reports_csv<W: Write>(reports: &[EvalReport], mut w: W) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    let opt = |v: Option<f64>| v.map(|v| format!("{v:.4}")).unwrap_or_default();
    for r in reports {
        writeln!(
            w,
            "{},{},{},{},{:.4},{},{},{}",
            r.noise,
            r.snr_db,
            r.estimator,
            r.method,
            r.ge_percent,
            opt(r.mae_hz),
            opt(r.sep_error_percent),
            r.frames_scored
        )?;
    }
    Ok(())
}
