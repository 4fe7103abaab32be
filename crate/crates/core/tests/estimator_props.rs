use pro_f0::emd::{emd_decompose, EmdConfig};
use pro_f0::estimators::hht::hht_candidates;
use pro_f0::estimators::pefac::pefac_estimate;
use pro_f0::estimators::shr::{shr_analyze, shr_estimate};
use pro_f0::estimators::swipe::swipe_estimate;
use pro_f0::estimators::{EstimatorConfig, PitchCandidate};
use pro_f0::eval::synth::{synthesize_utterance, SynthUtteranceSpec};
use pro_f0::signal::SampleBuffer;
use pro_f0::Result;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

type FrameEstimator = fn(&[f64], u32, &EstimatorConfig) -> Result<PitchCandidate>;

const FRAME_ESTIMATORS: [(&str, FrameEstimator); 3] = [
    ("pefac", pefac_estimate),
    ("shr", shr_estimate),
    ("swipe", swipe_estimate),
];

fn vowel_frame(f0: f64, len: usize) -> Vec<f64> {
    let u = synthesize_utterance(&SynthUtteranceSpec::flat(f0, 400.0, 8000)).unwrap();
    u.audio.samples()[1000..1000 + len].to_vec()
}

fn noise_frame(seed: u64, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn estimates_stay_in_range(seed in any::<u64>(), f0 in 60.0f64..390.0, voiced in any::<bool>()) {
        let cfg = EstimatorConfig::default();
        let frame = if voiced { vowel_frame(f0, 720) } else { noise_frame(seed, 720) };
        for (name, est) in FRAME_ESTIMATORS {
            let c = est(&frame, 8000, &cfg).unwrap();
            let (lo, hi) = if name == "swipe" { (cfg.swipe_f_min, cfg.swipe_f_max) } else { (cfg.f_min, cfg.f_max) };
            prop_assert!(c.f0_hz >= lo && c.f0_hz <= hi, "{name}: {}", c.f0_hz);
        }
    }

    #[test]
    fn frame_estimates_ignore_gain(f0 in 60.0f64..390.0, gain in 1e-3f64..1e3) {
        let cfg = EstimatorConfig::default();
        let frame = vowel_frame(f0, 720);
        let scaled: Vec<f64> = frame.iter().map(|v| v * gain).collect();
        for (name, est) in FRAME_ESTIMATORS {
            let a = est(&frame, 8000, &cfg).unwrap();
            let b = est(&scaled, 8000, &cfg).unwrap();
            prop_assert!((a.f0_hz - b.f0_hz).abs() <= 1e-6 * a.f0_hz, "{name}: {} vs {}", a.f0_hz, b.f0_hz);
        }
    }

    #[test]
    fn shr_of_a_pure_comb_is_small(f0 in 80.0f64..380.0) {
        let fs = 8000.0;
        let x: Vec<f64> = (0..720)
            .map(|i| {
                let t = i as f64 / fs;
                (1..=8).filter(|h| *h as f64 * f0 < 3800.0).map(|h| (2.0 * PI * h as f64 * f0 * t).cos()).sum()
            })
            .collect();
        let a = shr_analyze(&x, 8000, &EstimatorConfig::default()).unwrap();
        prop_assert!(a.ratio <= 0.05, "SHR {}", a.ratio);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hht_candidates_per_interval_are_bounded(f0 in 80.0f64..350.0, modes in 1usize..5, gain in 0.01f64..100.0) {
        let u = synthesize_utterance(&SynthUtteranceSpec::flat(f0, 300.0, 8000)).unwrap();
        let cfg = EstimatorConfig { hht_num_imfs: modes, ..EstimatorConfig::default() };
        let imfs = emd_decompose(&u.audio, &EmdConfig::default()).unwrap();
        prop_assume!(imfs.num_imfs() >= modes);
        let intervals = hht_candidates(&u.audio, &imfs, &cfg).unwrap();
        prop_assert!(!intervals.is_empty());
        for iv in &intervals {
            prop_assert!(iv.candidates.len() <= modes);
            for c in &iv.candidates {
                prop_assert!(c.f0_hz >= cfg.f_min && c.f0_hz <= cfg.f_max);
            }
        }

        let scaled = SampleBuffer::new(u.audio.samples().iter().map(|v| v * gain).collect(), 8000).unwrap();
        let scaled_imfs = emd_decompose(&scaled, &EmdConfig::default()).unwrap();
        prop_assume!(scaled_imfs.num_imfs() >= modes);
        let scaled_intervals = hht_candidates(&scaled, &scaled_imfs, &cfg).unwrap();
        let best = |iv: &[pro_f0::estimators::hht::IntervalCandidates]| -> Vec<Option<f64>> {
            iv.iter().map(|i| pro_f0::estimators::hht::hht_select(&i.candidates).map(|c| c.f0_hz)).collect()
        };
        let (a, b) = (best(&intervals), best(&scaled_intervals));
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            match (x, y) {
                (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-6 * x),
                (None, None) => {}
                _ => prop_assert!(false, "selection changed under gain"),
            }
        }
    }
}
