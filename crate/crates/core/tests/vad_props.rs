use pro_f0::eval::synth::{synthesize_utterance, SynthUtteranceSpec};
use pro_f0::signal::{frame_signal, SampleBuffer};
use pro_f0::vad::{detect_voiced, VadConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn speech_with_gaps(seed: u64, f0: f64) -> SampleBuffer {
    let voiced = synthesize_utterance(&SynthUtteranceSpec::flat(f0, 300.0, 8000)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hiss: Vec<f64> = (0..2400)
        .map(|_| 0.01 * rng.random_range(-1.0..1.0))
        .collect();
    let mut x = hiss.clone();
    x.extend_from_slice(voiced.audio.samples());
    x.extend_from_slice(&hiss);
    SampleBuffer::new(x, 8000).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mask_ignores_gain(seed in any::<u64>(), f0 in 80.0f64..350.0, gain in 1e-3f64..1e3) {
        let x = speech_with_gaps(seed, f0);
        let cfg = VadConfig::default();
        let a = detect_voiced(&x, &cfg).unwrap();
        let scaled = SampleBuffer::new(x.samples().iter().map(|v| v * gain).collect(), 8000).unwrap();
        prop_assert_eq!(detect_voiced(&scaled, &cfg).unwrap(), a);
    }

    #[test]
    fn mask_length_matches_framing(len in 200usize..20000, frame_ms in 10.0f64..40.0, hop_ms in 5.0f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(len as u64);
        let x = SampleBuffer::new((0..len).map(|_| rng.random_range(-1.0..1.0)).collect(), 8000).unwrap();
        let cfg = VadConfig { frame_ms, hop_ms, ..VadConfig::default() };
        prop_assume!(len >= x.ms_to_samples(frame_ms));
        let frames = frame_signal(&x, &cfg.frame_spec()).unwrap();
        prop_assert_eq!(detect_voiced(&x, &cfg).unwrap().len(), frames.len());
    }
}

#[test]
fn voiced_middle_is_detected() {
    let x = speech_with_gaps(1, 140.0);
    let mask = detect_voiced(&x, &VadConfig::default()).unwrap();
    let n = mask.len();
    assert!(!mask[0] && !mask[n - 1]);
    assert!(mask[n / 2]);
}
