//! Layered run configuration: defaults, then a TOML file, then flags.

use std::path::Path;

use anyhow::{Context, Result};
use clap::Args;
use serde::de::{value::StrDeserializer, DeserializeOwned, IntoDeserializer};
use serde::{Deserialize, Serialize};

use pro_f0::emd::EmdConfig;
use pro_f0::estimators::{EstimatorConfig, EstimatorKind};
use pro_f0::eval::bench::{BenchConfig, Method, VoicingSource};
use pro_f0::eval::metrics::VoicingGate;
use pro_f0::pro::{LeadingFrames, PairSelection, PipelineConfig, ProConfig};
use pro_f0::signal::Window;
use pro_f0::vad::VadConfig;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub emd: EmdConfig,
    pub estimator: EstimatorConfig,
    pub pro: ProConfig,
    pub vad: VadConfig,
    pub bench: BenchConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            emd: self.emd.clone(),
            estimator: self.estimator.clone(),
            pro: self.pro.clone(),
            vad: self.vad.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.pipeline().validate()?;
        self.bench.validate()?;
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }
}

/// Parses a lowercase/kebab-case enum name the same way the config file does.
fn named<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    let de: StrDeserializer<'_, serde::de::value::Error> = s.trim().into_deserializer();
    T::deserialize(de).map_err(|e| e.to_string())
}

/// Overrides for every configuration value. Each flag is named after its
/// key in the config file (`[section] key` becomes `--section-key`).
#[derive(Debug, Clone, Default, Args)]
#[command(next_help_heading = "Configuration overrides")]
pub struct Overrides {
    /// Maximum number of modes extracted by EMD.
    #[arg(long, global = true, value_name = "N")]
    pub emd_max_imfs: Option<usize>,
    /// Sifting stops when the Cauchy SD criterion drops below this.
    #[arg(long, global = true, value_name = "X")]
    pub emd_sift_stop_sd: Option<f64>,
    /// Cap on sifting iterations per mode.
    #[arg(long, global = true, value_name = "N")]
    pub emd_max_sift_iters: Option<usize>,
    /// EEMD ensemble size.
    #[arg(long, global = true, value_name = "N")]
    pub emd_ensemble_size: Option<usize>,
    /// Added noise std as a fraction of the signal std.
    #[arg(long, global = true, value_name = "X")]
    pub emd_wgn_std_ratio: Option<f64>,
    /// Seed of the EEMD noise.
    #[arg(long, global = true, value_name = "SEED")]
    pub emd_rng_seed: Option<u64>,

    /// Lower F0 bound for pefac, shr and hht (Hz).
    #[arg(long, global = true, value_name = "HZ")]
    pub estimator_f_min: Option<f64>,
    /// Upper F0 bound for pefac, shr and hht (Hz).
    #[arg(long, global = true, value_name = "HZ")]
    pub estimator_f_max: Option<f64>,
    #[arg(long, global = true, value_name = "HZ")]
    pub estimator_swipe_f_min: Option<f64>,
    #[arg(long, global = true, value_name = "HZ")]
    pub estimator_swipe_f_max: Option<f64>,
    /// SHR above this halves the harmonic pick.
    #[arg(long, global = true, value_name = "X")]
    pub estimator_shr_threshold: Option<f64>,
    #[arg(long, global = true, value_name = "N")]
    pub estimator_shr_harmonics: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    pub estimator_swipe_bins_per_octave: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    pub estimator_swipe_peaks: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    pub estimator_pefac_harmonics: Option<usize>,
    /// PEFAC-lite picks below this salience count as "no pitch".
    #[arg(long, global = true, value_name = "X")]
    pub estimator_pefac_min_salience: Option<f64>,
    /// Modes used by HHT-Amp.
    #[arg(long, global = true, value_name = "N")]
    pub estimator_hht_num_imfs: Option<usize>,
    /// Frame length of shr, swipe and hht (ms).
    #[arg(long, global = true, value_name = "MS")]
    pub estimator_frame_ms: Option<f64>,

    /// Low/high boundary (Hz); a mean of exactly gamma is low.
    #[arg(long, global = true, value_name = "HZ")]
    pub pro_gamma: Option<f64>,
    /// Number of leading modes analysed for separation.
    #[arg(long, global = true, value_name = "K")]
    pub pro_k_imfs: Option<usize>,
    /// Per-mode estimator: pefac, shr or swipe.
    #[arg(long, global = true, value_name = "NAME", value_parser = named::<EstimatorKind>)]
    pub pro_inner_estimator: Option<EstimatorKind>,
    /// Pair rule: row-sum or pairwise-min.
    #[arg(long, global = true, value_name = "RULE", value_parser = named::<PairSelection>)]
    pub pro_selection: Option<PairSelection>,
    /// Pairs further apart than this inherit the previous region (1 disables).
    #[arg(long, global = true, value_name = "X")]
    pub pro_max_pair_distance: Option<f64>,
    /// Frames before the first decided one: low or first-decided.
    #[arg(long, global = true, value_name = "MODE", value_parser = named::<LeadingFrames>)]
    pub pro_leading_frames: Option<LeadingFrames>,
    /// Per-mode analysis frame length (ms).
    #[arg(long, global = true, value_name = "MS")]
    pub pro_frame_len_ms: Option<f64>,
    /// Analysis hop (ms); also the output frame rate.
    #[arg(long, global = true, value_name = "MS")]
    pub pro_frame_hop_ms: Option<f64>,
    /// Per-mode analysis window: hann or rectangular.
    #[arg(long, global = true, value_name = "WINDOW", value_parser = named::<Window>)]
    pub pro_frame_window: Option<Window>,

    #[arg(long, global = true, value_name = "MS")]
    pub vad_frame_ms: Option<f64>,
    #[arg(long, global = true, value_name = "MS")]
    pub vad_hop_ms: Option<f64>,
    /// Voiced frames have a zero-crossing rate below this.
    #[arg(long, global = true, value_name = "X")]
    pub vad_zcr_max: Option<f64>,
    /// Voiced frames exceed this fraction of the mean frame energy.
    #[arg(long, global = true, value_name = "X")]
    pub vad_energy_min_ratio: Option<f64>,
    /// Majority-filter radius in frames.
    #[arg(long, global = true, value_name = "N")]
    pub vad_hangover_frames: Option<usize>,

    /// Comma-separated SNRs in dB.
    #[arg(
        long,
        global = true,
        value_name = "LIST",
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    pub bench_snrs_db: Option<Vec<f64>>,
    /// Comma-separated estimators (pefac, shr, swipe, hht).
    #[arg(long, global = true, value_name = "LIST", value_delimiter = ',')]
    pub bench_estimators: Option<Vec<EstimatorKind>>,
    /// Comma-separated methods (raw, pro).
    #[arg(long, global = true, value_name = "LIST", value_delimiter = ',')]
    pub bench_methods: Option<Vec<Method>>,
    /// Frames scored: ref-voiced or detected-voiced.
    #[arg(long, global = true, value_name = "GATE", value_parser = named::<VoicingGate>)]
    pub bench_gate: Option<VoicingGate>,
    /// Voicing fed to the estimators: detected or reference.
    #[arg(long, global = true, value_name = "SOURCE", value_parser = named::<VoicingSource>)]
    pub bench_voicing: Option<VoicingSource>,
    /// Seed of the noise segments and mixing offsets.
    #[arg(long, global = true, value_name = "SEED")]
    pub bench_seed: Option<u64>,
}

macro_rules! apply {
    ($src:expr, $($flag:ident => $dst:expr),+ $(,)?) => {
        $( if let Some(v) = $src.$flag.clone() { $dst = v; } )+
    };
}

impl Overrides {
    pub fn apply(&self, c: &mut RunConfig) {
        apply!(self,
            emd_max_imfs => c.emd.max_imfs,
            emd_sift_stop_sd => c.emd.sift_stop_sd,
            emd_max_sift_iters => c.emd.max_sift_iters,
            emd_ensemble_size => c.emd.ensemble_size,
            emd_wgn_std_ratio => c.emd.wgn_std_ratio,
            emd_rng_seed => c.emd.rng_seed,
            estimator_f_min => c.estimator.f_min,
            estimator_f_max => c.estimator.f_max,
            estimator_swipe_f_min => c.estimator.swipe_f_min,
            estimator_swipe_f_max => c.estimator.swipe_f_max,
            estimator_shr_threshold => c.estimator.shr_threshold,
            estimator_shr_harmonics => c.estimator.shr_harmonics,
            estimator_swipe_bins_per_octave => c.estimator.swipe_bins_per_octave,
            estimator_swipe_peaks => c.estimator.swipe_peaks,
            estimator_pefac_harmonics => c.estimator.pefac_harmonics,
            estimator_pefac_min_salience => c.estimator.pefac_min_salience,
            estimator_hht_num_imfs => c.estimator.hht_num_imfs,
            estimator_frame_ms => c.estimator.frame_ms,
            pro_gamma => c.pro.gamma,
            pro_k_imfs => c.pro.k_imfs,
            pro_inner_estimator => c.pro.inner_estimator,
            pro_selection => c.pro.selection,
            pro_max_pair_distance => c.pro.max_pair_distance,
            pro_leading_frames => c.pro.leading_frames,
            pro_frame_len_ms => c.pro.frame.frame_len_ms,
            pro_frame_hop_ms => c.pro.frame.hop_ms,
            pro_frame_window => c.pro.frame.window,
            vad_frame_ms => c.vad.frame_ms,
            vad_hop_ms => c.vad.hop_ms,
            vad_zcr_max => c.vad.zcr_max,
            vad_energy_min_ratio => c.vad.energy_min_ratio,
            vad_hangover_frames => c.vad.hangover_frames,
            bench_snrs_db => c.bench.snrs_db,
            bench_estimators => c.bench.estimators,
            bench_methods => c.bench.methods,
            bench_gate => c.bench.gate,
            bench_voicing => c.bench.voicing,
            bench_seed => c.bench.seed,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enum_names_match_the_file_format() {
        assert_eq!(
            named::<PairSelection>("pairwise-min").unwrap(),
            PairSelection::PairwiseMin
        );
        assert_eq!(
            named::<VoicingGate>("detected-voiced").unwrap(),
            VoicingGate::DetectedVoiced
        );
        assert_eq!(
            named::<LeadingFrames>("first-decided").unwrap(),
            LeadingFrames::FirstDecided
        );
        assert!(named::<Window>("hamming").is_err());
    }

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = RunConfig::default();
        let back: RunConfig = toml::from_str(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_file_keeps_other_defaults() {
        let c: RunConfig = toml::from_str("[pro]\ngamma = 180.0\n").unwrap();
        assert_eq!(c.pro.gamma, 180.0);
        assert_eq!(c.pro.k_imfs, 4);
        assert_eq!(c.emd, EmdConfig::default());
    }
}
