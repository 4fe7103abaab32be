//! Low/high frequency separation of voiced frames and octave correction of
//! F0 candidates.
//!
//! Each frame's F0 is estimated independently on the first four IMFs of an
//! EEMD. The normalized pairwise distances `|a − b| / (a + b)` between those
//! estimates are summed per row, the two IMFs with the smallest sums are
//! kept, and the mean of their estimates is compared against `gamma` to
//! label the frame low or high. Candidates from any base estimator are then
//! folded into `[50, 200]` Hz (low) or `(200, 400]` Hz (high).

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::emd::{eemd_decompose, EmdConfig, ImfSet};
use crate::error::{Error, Result};
use crate::estimators::{
    hht_candidates, hht_select, pefac_estimate, shr_estimate, swipe_estimate, EstimatorConfig,
    EstimatorKind, PitchCandidate,
};
use crate::eval::track::{align_nearest, FramePitchTrack};
use crate::signal::{centered_frame_count, CenteredFrames, FrameSpec, SampleBuffer};
use crate::vad::{detect_voiced_centered, VadConfig};

/// Lowest candidate frequency the correction rules cover.
pub const MODEL_FLOOR_HZ: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Low,
    High,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Low => "low",
            Region::High => "high",
        })
    }
}

/// How the two most consistent IMFs are chosen from the distance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PairSelection {
    /// The two rows with the smallest sums.
    #[default]
    RowSum,
    /// The single closest pair (smallest off-diagonal entry).
    PairwiseMin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LeadingFrames {
    /// Always low.
    Low,
    /// Copied back from the first frame that was decided by a pair.
    #[default]
    FirstDecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProConfig {
    pub gamma: f64,
    pub k_imfs: usize,
    pub inner_estimator: EstimatorKind,
    pub selection: PairSelection,
    /// A frame whose selected pair is further apart than this distance
    /// is treated like one with too few estimates. 1.0 never triggers.
    pub max_pair_distance: f64,
    /// Region given to the frames before the first one with a usable pair.
    pub leading_frames: LeadingFrames,
    /// Framing of the per-IMF inner estimator.
    pub frame: FrameSpec,
}

impl Default for ProConfig {
    fn default() -> Self {
        Self {
            gamma: 200.0,
            k_imfs: 4,
            inner_estimator: EstimatorKind::Pefac,
            selection: PairSelection::RowSum,
            max_pair_distance: 0.03,
            leading_frames: LeadingFrames::FirstDecided,
            frame: FrameSpec::default(),
        }
    }
}

impl ProConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 50.0 && self.gamma < 400.0) {
            return Err(Error::InvalidConfig(format!(
                "gamma {} outside (50, 400)",
                self.gamma
            )));
        }
        if !(self.max_pair_distance > 0.0 && self.max_pair_distance <= 1.0) {
            return Err(Error::InvalidConfig(
                "max_pair_distance must lie in (0, 1]".into(),
            ));
        }
        if self.k_imfs < 2 {
            return Err(Error::InvalidConfig("k_imfs must be at least 2".into()));
        }
        if self.inner_estimator == EstimatorKind::Hht {
            return Err(Error::InvalidConfig(
                "the per-IMF inner estimator must be frame based (pefac, shr or swipe)".into(),
            ));
        }
        self.frame.validate()
    }
}

/// F0 of one frame on each of the first `k_imfs` modes; `None` where the
/// inner estimator found no pitch.
#[derive(Debug, Clone, PartialEq)]
pub struct ImfPitchVector {
    pub frame_index: usize,
    pub time_ms: f64,
    pub f0_per_imf: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyRegion {
    pub frame_index: usize,
    pub region: Region,
    /// Mean F0 of the selected pair; `None` when the region was inherited.
    pub mean_f0: Option<f64>,
    /// Selected IMF numbers (1-based), ascending.
    pub selected_imfs: Option<(usize, usize)>,
}

impl FrequencyRegion {
    pub fn inherited(&self) -> bool {
        self.selected_imfs.is_none()
    }
}

fn frame_estimate(
    kind: EstimatorKind,
    frame: &[f64],
    sample_rate_hz: u32,
    cfg: &EstimatorConfig,
) -> Result<Option<PitchCandidate>> {
    let result = match kind {
        EstimatorKind::Pefac => pefac_estimate(frame, sample_rate_hz, cfg),
        EstimatorKind::Shr => shr_estimate(frame, sample_rate_hz, cfg),
        EstimatorKind::Swipe => swipe_estimate(frame, sample_rate_hz, cfg),
        EstimatorKind::Hht => {
            return Err(Error::InvalidConfig(
                "HHT-Amp works on IMFs, not frames".into(),
            ));
        }
    };
    match result {
        Ok(c) if c.low_confidence => Ok(None),
        Ok(c) => Ok(Some(c)),
        Err(Error::DegenerateFrame) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Runs the inner estimator on every frame of each of the first
/// `cfg.k_imfs` modes. Frame `q` is centred on `q * spec.hop_ms`.
pub fn imf_pitch_vector(
    imfs: &ImfSet,
    spec: &FrameSpec,
    cfg: &ProConfig,
    est: &EstimatorConfig,
) -> Result<Vec<ImfPitchVector>> {
    cfg.validate()?;
    spec.validate()?;
    if imfs.num_imfs() < cfg.k_imfs {
        return Err(Error::TooFewImfs {
            needed: cfg.k_imfs,
            available: imfs.num_imfs(),
        });
    }
    let fs = imfs.sample_rate_hz;
    let per_mode: Vec<Vec<Option<f64>>> = imfs.imfs[..cfg.k_imfs]
        .par_iter()
        .map(|mode| {
            let frames = CenteredFrames::new(mode, fs, spec.frame_len_ms, spec.hop_ms);
            (0..frames.len())
                .map(|q| {
                    frame_estimate(cfg.inner_estimator, frames.frame(q), fs, est)
                        .map(|c| c.map(|c| c.f0_hz))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let count = per_mode[0].len();
    Ok((0..count)
        .map(|q| ImfPitchVector {
            frame_index: q,
            time_ms: q as f64 * spec.hop_ms,
            f0_per_imf: per_mode.iter().map(|m| m[q]).collect(),
        })
        .collect())
}

/// Normalized distance `|a − b| / (a + b)` between every pair of estimates.
pub fn distance_matrix(f0: &[f64]) -> Result<Vec<Vec<f64>>> {
    if let Some(&bad) = f0.iter().find(|&&f| !(f > 0.0)) {
        return Err(Error::NonPositiveF0(bad));
    }
    Ok(f0
        .iter()
        .map(|&a| {
            f0.iter()
                .map(|&b| {
                    if a == b {
                        0.0
                    } else {
                        ((a - b) / (a + b)).abs()
                    }
                })
                .collect()
        })
        .collect())
}

/// Rows chosen from a distance matrix, with the per-row variation scores.
#[derive(Debug, Clone, PartialEq)]
pub struct PairChoice {
    /// 0-based row indices, ascending.
    pub rows: (usize, usize),
    pub scores: Vec<f64>,
}

/// The two rows with the smallest sums; ties go to the smaller index.
pub fn select_imf_pair(d: &[Vec<f64>]) -> PairChoice {
    select_pair(d, PairSelection::RowSum)
}

pub fn select_pair(d: &[Vec<f64>], rule: PairSelection) -> PairChoice {
    let scores: Vec<f64> = d.iter().map(|row| row.iter().sum()).collect();
    assert!(scores.len() >= 2, "distance matrix needs at least two rows");
    let rows = match rule {
        PairSelection::RowSum => {
            let mut order: Vec<usize> = (0..scores.len()).collect();
            // Stable sort keeps the lower index first on ties.
            order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
            let (a, b) = (order[0], order[1]);
            (a.min(b), a.max(b))
        }
        PairSelection::PairwiseMin => {
            let mut best = (0, 1);
            for i in 0..d.len() {
                for j in i + 1..d.len() {
                    if d[i][j] < d[best.0][best.1] {
                        best = (i, j);
                    }
                }
            }
            best
        }
    };
    PairChoice { rows, scores }
}

/// Labels one frame. Missing estimates are left out of the distance matrix;
/// with fewer than two left the frame takes `previous` (or low).
pub fn classify_region(
    v: &ImfPitchVector,
    cfg: &ProConfig,
    previous: Option<Region>,
) -> Result<FrequencyRegion> {
    let present: Vec<(usize, f64)> = v
        .f0_per_imf
        .iter()
        .enumerate()
        .filter_map(|(k, f)| f.map(|f| (k, f)))
        .collect();
    let inherit = FrequencyRegion {
        frame_index: v.frame_index,
        region: previous.unwrap_or(Region::Low),
        mean_f0: None,
        selected_imfs: None,
    };
    if present.len() < 2 {
        return Ok(inherit);
    }
    let values: Vec<f64> = present.iter().map(|&(_, f)| f).collect();
    let d = distance_matrix(&values)?;
    let choice = select_pair(&d, cfg.selection);
    let (a, b) = choice.rows;
    if d[a][b] > cfg.max_pair_distance {
        return Ok(inherit);
    }
    let mean = 0.5 * (values[a] + values[b]);
    Ok(FrequencyRegion {
        frame_index: v.frame_index,
        region: if mean <= cfg.gamma {
            Region::Low
        } else {
            Region::High
        },
        mean_f0: Some(mean),
        selected_imfs: Some((present[a].0 + 1, present[b].0 + 1)),
    })
}

/// Labels frames in order so that frames without enough estimates can
/// inherit the previous label. Frames ahead of the first decided one are
/// then handled per `cfg.leading_frames`.
pub fn classify_regions(
    vectors: &[ImfPitchVector],
    cfg: &ProConfig,
) -> Result<Vec<FrequencyRegion>> {
    let mut out: Vec<FrequencyRegion> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let previous = out.last().map(|r| r.region);
        out.push(classify_region(v, cfg, previous)?);
    }
    if cfg.leading_frames == LeadingFrames::FirstDecided {
        if let Some(first) = out.iter().position(|r| !r.inherited()) {
            let region = out[first].region;
            out[..first].iter_mut().for_each(|r| r.region = region);
        }
    }
    Ok(out)
}

/// Folds a candidate into the octave band of `region`. Candidates below
/// 50 Hz are returned unchanged (see [`is_out_of_model`]).
pub fn correct_candidate(f_cand: f64, region: Region) -> Result<f64> {
    if !(f_cand > 0.0) || !f_cand.is_finite() {
        return Err(Error::NonPositiveF0(f_cand));
    }
    if f_cand < MODEL_FLOOR_HZ {
        return Ok(f_cand);
    }
    Ok(match region {
        Region::Low => {
            if f_cand <= 200.0 {
                f_cand
            } else if f_cand <= 400.0 {
                0.5 * f_cand
            } else {
                0.25 * f_cand
            }
        }
        Region::High => {
            if f_cand <= 100.0 {
                4.0 * f_cand
            } else if f_cand <= 200.0 {
                2.0 * f_cand
            } else if f_cand <= 400.0 {
                f_cand
            } else {
                0.5 * f_cand
            }
        }
    })
}

/// True for candidates the correction rules do not cover.
pub fn is_out_of_model(f_cand: f64) -> bool {
    f_cand < MODEL_FLOOR_HZ
}

/// Every knob of the end-to-end pipeline.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub emd: EmdConfig,
    pub estimator: EstimatorConfig,
    pub pro: ProConfig,
    pub vad: VadConfig,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.emd.validate()?;
        self.estimator.validate()?;
        self.pro.validate()?;
        self.vad.validate()
    }
}

/// Raw and corrected output of one base estimator on the analysis grid.
#[derive(Debug, Clone)]
pub struct EstimatorFrames {
    pub kind: EstimatorKind,
    pub raw_candidates: Vec<Vec<PitchCandidate>>,
    pub corrected_candidates: Vec<Vec<PitchCandidate>>,
    pub out_of_model: Vec<bool>,
    pub raw_f0: Vec<Option<f64>>,
    pub pro_f0: Vec<Option<f64>>,
}

/// Everything computed for one utterance.
#[derive(Debug, Clone)]
pub struct UtteranceAnalysis {
    pub times_ms: Vec<f64>,
    pub voiced: Vec<bool>,
    /// Present when the decomposition had enough modes.
    pub regions: Option<Vec<FrequencyRegion>>,
    pub imf_vectors: Vec<ImfPitchVector>,
    pub estimators: Vec<EstimatorFrames>,
}

impl UtteranceAnalysis {
    pub fn estimator(&self, kind: EstimatorKind) -> Option<&EstimatorFrames> {
        self.estimators.iter().find(|e| e.kind == kind)
    }

    pub fn track(&self, kind: EstimatorKind, pro: bool) -> Option<FramePitchTrack> {
        let e = self.estimator(kind)?;
        let f0 = if pro {
            e.pro_f0.clone()
        } else {
            e.raw_f0.clone()
        };
        Some(FramePitchTrack {
            frame_times_ms: self.times_ms.clone(),
            f0_hz: f0,
            voiced_mask: self.voiced.clone(),
        })
    }

    /// Writes one diagnostics row per frame for `kind`.
    pub fn write_diagnostics_csv<W: Write>(&self, kind: EstimatorKind, mut w: W) -> Result<()> {
        let e = self
            .estimator(kind)
            .ok_or_else(|| Error::InvalidConfig(format!("estimator {kind} was not run")))?;
        writeln!(
            w,
            "time_ms,voiced,region,mean_f0_hz,imf_pair,raw_candidates_hz,corrected_candidates_hz,raw_f0_hz,pro_f0_hz,out_of_model"
        )?;
        let join = |c: &[PitchCandidate]| {
            c.iter()
                .map(|c| format!("{:.2}", c.f0_hz))
                .collect::<Vec<_>>()
                .join(" ")
        };
        for q in 0..self.times_ms.len() {
            let region = self.regions.as_ref().map(|r| &r[q]);
            writeln!(
                w,
                "{:.1},{},{},{},{},{},{},{:.2},{:.2},{}",
                self.times_ms[q],
                u8::from(self.voiced[q]),
                region.map(|r| r.region.to_string()).unwrap_or_default(),
                region
                    .and_then(|r| r.mean_f0)
                    .map(|m| format!("{m:.2}"))
                    .unwrap_or_default(),
                region
                    .and_then(|r| r.selected_imfs)
                    .map(|(a, b)| format!("{a}-{b}"))
                    .unwrap_or_default(),
                join(&e.raw_candidates[q]),
                join(&e.corrected_candidates[q]),
                e.raw_f0[q].unwrap_or(0.0),
                e.pro_f0[q].unwrap_or(0.0),
                u8::from(e.out_of_model[q]),
            )?;
        }
        Ok(())
    }
}

/// Candidates of `kind` on the 10 ms grid, only on `voiced` frames.
fn base_candidates(
    kind: EstimatorKind,
    signal: &SampleBuffer,
    imfs: Option<&ImfSet>,
    voiced: &[bool],
    cfg: &PipelineConfig,
) -> Result<Vec<Vec<PitchCandidate>>> {
    let fs = signal.sample_rate_hz();
    let hop_ms = cfg.pro.frame.hop_ms;
    if kind == EstimatorKind::Hht {
        let imfs =
            imfs.ok_or_else(|| Error::InvalidConfig("HHT-Amp needs a decomposition".into()))?;
        if imfs.num_imfs() < cfg.estimator.hht_num_imfs {
            return Ok(vec![Vec::new(); voiced.len()]);
        }
        let intervals = hht_candidates(signal, imfs, &cfg.estimator)?;
        let times: Vec<f64> = intervals.iter().map(|c| c.time_ms).collect();
        let grid: Vec<f64> = (0..voiced.len()).map(|q| q as f64 * hop_ms).collect();
        let idx = align_nearest(&times, &grid, 0.5 * hop_ms);
        return Ok(idx
            .iter()
            .zip(voiced)
            .map(|(i, &v)| match (i, v) {
                (Some(i), true) => intervals[*i].candidates.clone(),
                _ => Vec::new(),
            })
            .collect());
    }
    let frame_ms = match kind {
        EstimatorKind::Pefac => cfg.pro.frame.frame_len_ms,
        _ => cfg.estimator.frame_ms,
    };
    let frames = CenteredFrames::new(signal.samples(), fs, frame_ms, hop_ms);
    (0..voiced.len())
        .into_par_iter()
        .map(|q| {
            if !voiced[q] || q >= frames.len() {
                return Ok(Vec::new());
            }
            frame_estimate(kind, frames.frame(q), fs, &cfg.estimator)
                .map(|c| c.into_iter().collect())
        })
        .collect()
}

fn select_final(kind: EstimatorKind, cands: &[PitchCandidate]) -> Option<f64> {
    match kind {
        EstimatorKind::Hht => hht_select(cands).map(|c| c.f0_hz),
        _ => cands.first().map(|c| c.f0_hz),
    }
}

/// Runs VAD, EEMD, region classification and every requested base
/// estimator, producing both raw and corrected tracks.
pub fn analyze_utterance(
    noisy: &SampleBuffer,
    estimators: &[EstimatorKind],
    cfg: &PipelineConfig,
) -> Result<UtteranceAnalysis> {
    cfg.validate()?;
    let times_ms = analysis_times(noisy, cfg);
    let voiced = if noisy.duration_ms() >= cfg.vad.frame_ms {
        let (vad_times, vad_mask) = detect_voiced_centered(noisy, &cfg.vad)?;
        align_nearest(&vad_times, &times_ms, 0.5 * cfg.pro.frame.hop_ms)
            .into_iter()
            .map(|i| i.is_some_and(|i| vad_mask[i]))
            .collect()
    } else {
        vec![false; times_ms.len()]
    };
    analyze_with_voicing(noisy, estimators, cfg, voiced)
}

/// Centre times of the analysis frames of `noisy`.
pub fn analysis_times(noisy: &SampleBuffer, cfg: &PipelineConfig) -> Vec<f64> {
    let hop_ms = cfg.pro.frame.hop_ms;
    let count = centered_frame_count(noisy.len(), noisy.sample_rate_hz(), hop_ms);
    (0..count).map(|q| q as f64 * hop_ms).collect()
}

/// Same as [`analyze_utterance`] with an externally supplied voicing mask
/// on the [`analysis_times`] grid instead of the detector's.
pub fn analyze_with_voicing(
    noisy: &SampleBuffer,
    estimators: &[EstimatorKind],
    cfg: &PipelineConfig,
    voiced: Vec<bool>,
) -> Result<UtteranceAnalysis> {
    cfg.validate()?;
    let times_ms = analysis_times(noisy, cfg);
    let count = times_ms.len();
    if voiced.len() != count {
        return Err(Error::TrackMismatch(voiced.len(), count));
    }

    let empty = |kind| EstimatorFrames {
        kind,
        raw_candidates: vec![Vec::new(); count],
        corrected_candidates: vec![Vec::new(); count],
        out_of_model: vec![false; count],
        raw_f0: vec![None; count],
        pro_f0: vec![None; count],
    };
    let imfs = eemd_decompose(noisy, &cfg.emd)?;
    let (imf_vectors, regions) = if imfs.num_imfs() >= cfg.pro.k_imfs {
        let vectors = imf_pitch_vector(&imfs, &cfg.pro.frame, &cfg.pro, &cfg.estimator)?;
        let regions = classify_regions(&vectors, &cfg.pro)?;
        (vectors, Some(regions))
    } else {
        (Vec::new(), None)
    };

    let mut results = Vec::with_capacity(estimators.len());
    for &kind in estimators {
        let raw_candidates = base_candidates(kind, noisy, Some(&imfs), &voiced, cfg)?;
        let mut out = empty(kind);
        for q in 0..count {
            let raw = &raw_candidates[q];
            out.raw_f0[q] = select_final(kind, raw);
            let region = regions.as_ref().map(|r| r[q].region);
            let corrected: Vec<PitchCandidate> = match region {
                Some(region) => raw
                    .iter()
                    .map(|c| {
                        Ok(PitchCandidate {
                            f0_hz: correct_candidate(c.f0_hz, region)?,
                            ..*c
                        })
                    })
                    .collect::<Result<_>>()?,
                None => raw.clone(),
            };
            out.out_of_model[q] = raw.iter().any(|c| is_out_of_model(c.f0_hz));
            out.pro_f0[q] = select_final(kind, &corrected);
            out.corrected_candidates[q] = corrected;
        }
        out.raw_candidates = raw_candidates;
        results.push(out);
    }
    Ok(UtteranceAnalysis {
        times_ms,
        voiced,
        regions,
        imf_vectors,
        estimators: results,
    })
}

/// End-to-end PRO tracking with one base estimator.
pub fn pro_pipeline(
    noisy: &SampleBuffer,
    base: EstimatorKind,
    cfg: &PipelineConfig,
) -> Result<FramePitchTrack> {
    let analysis = analyze_utterance(noisy, &[base], cfg)?;
    Ok(analysis.track(base, true).expect("estimator was requested"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vector(f0: &[f64]) -> ImfPitchVector {
        ImfPitchVector {
            frame_index: 0,
            time_ms: 0.0,
            f0_per_imf: f0.iter().map(|&f| Some(f)).collect(),
        }
    }

    #[test]
    fn identical_entries_give_zero_matrix() {
        let d = distance_matrix(&[100.0; 4]).unwrap();
        assert!(d.iter().flatten().all(|&v| v == 0.0));
        assert_eq!(select_imf_pair(&d).rows, (0, 1));
    }

    #[test]
    fn distance_of_100_and_300() {
        let d = distance_matrix(&[100.0, 300.0]).unwrap();
        assert_eq!(d[0][1], 0.5);
        assert_eq!(d[1][0], 0.5);
    }

    #[test]
    fn non_positive_entry_is_rejected() {
        assert!(matches!(
            distance_matrix(&[100.0, 0.0]),
            Err(Error::NonPositiveF0(_))
        ));
    }

    #[test]
    fn close_pair_is_selected() {
        let d = distance_matrix(&[100.0, 101.0, 250.0, 400.0]).unwrap();
        assert_eq!(select_imf_pair(&d).rows, (0, 1));
    }

    #[test]
    fn region_examples() {
        let cfg = ProConfig::default();
        let r = classify_region(&vector(&[180.0, 190.0, 185.0, 600.0]), &cfg, None).unwrap();
        assert_eq!(r.region, Region::Low);
        let r = classify_region(&vector(&[210.0, 230.0, 220.0, 60.0]), &cfg, None).unwrap();
        assert_eq!(r.region, Region::High);
        let r = classify_region(&vector(&[200.0, 200.0, 200.0, 200.0]), &cfg, None).unwrap();
        assert_eq!(r.mean_f0, Some(200.0));
        assert_eq!(r.region, Region::Low);
        assert_eq!(r.selected_imfs, Some((1, 2)));
    }

    #[test]
    fn missing_estimates_are_excluded() {
        let cfg = ProConfig::default();
        let v = ImfPitchVector {
            frame_index: 3,
            time_ms: 30.0,
            f0_per_imf: vec![None, Some(300.0), Some(80.0), Some(305.0)],
        };
        let r = classify_region(&v, &cfg, None).unwrap();
        assert_eq!(r.selected_imfs, Some((2, 4)));
        assert_eq!(r.region, Region::High);
        let v = ImfPitchVector {
            frame_index: 4,
            time_ms: 40.0,
            f0_per_imf: vec![None, None, Some(80.0), None],
        };
        assert_eq!(
            classify_region(&v, &cfg, Some(Region::High))
                .unwrap()
                .region,
            Region::High
        );
        assert_eq!(classify_region(&v, &cfg, None).unwrap().region, Region::Low);
    }

    #[test]
    fn correction_examples() {
        assert_eq!(correct_candidate(320.0, Region::Low).unwrap(), 160.0);
        assert_eq!(correct_candidate(150.0, Region::High).unwrap(), 300.0);
        assert_eq!(correct_candidate(150.0, Region::Low).unwrap(), 150.0);
        assert_eq!(correct_candidate(450.0, Region::High).unwrap(), 225.0);
        assert_eq!(correct_candidate(40.0, Region::High).unwrap(), 40.0);
        assert!(is_out_of_model(40.0));
        assert!(correct_candidate(0.0, Region::Low).is_err());
        assert!(correct_candidate(-5.0, Region::Low).is_err());
    }

    #[test]
    fn pairwise_min_rule() {
        // Row sums favour IMFs 2 and 4, but 1 and 4 are the closest pair.
        let d = distance_matrix(&[100.0, 150.0, 160.0, 100.5]).unwrap();
        assert_eq!(select_pair(&d, PairSelection::RowSum).rows, (1, 3));
        assert_eq!(select_pair(&d, PairSelection::PairwiseMin).rows, (0, 3));
    }

    #[test]
    fn gamma_bounds() {
        let cfg = ProConfig {
            gamma: 40.0,
            ..ProConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
