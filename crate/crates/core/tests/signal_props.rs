use pro_f0::signal::{frame_signal, mix_at_snr, FrameSpec, NoisyMix, SampleBuffer, Window};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_buffer(seed: u64, len: usize, amp: f64) -> SampleBuffer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SampleBuffer::new(
        (0..len)
            .map(|_| amp * rng.random_range(-1.0..1.0))
            .collect(),
        8000,
    )
    .unwrap()
}

fn power(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mix_reaches_requested_snr(
        seed in any::<u64>(),
        len in 200usize..4000,
        extra in 0usize..4000,
        snr in -30.0f64..30.0,
        clean_amp in 1e-3f64..10.0,
        noise_amp in 1e-3f64..10.0,
    ) {
        let clean = random_buffer(seed, len, clean_amp);
        let noise = random_buffer(seed ^ 0xABCD, len + extra, noise_amp);
        let mix = NoisyMix { clean: clean.clone(), noise, snr_db: snr, seed };
        let out = mix_at_snr(&mix).unwrap();
        let residual: Vec<f64> = out.samples().iter().zip(clean.samples()).map(|(m, c)| m - c).collect();
        let achieved = 10.0 * (power(clean.samples()) / power(&residual)).log10();
        prop_assert!((achieved - snr).abs() <= 0.01, "asked {snr}, got {achieved}");
        prop_assert_eq!(mix_at_snr(&mix).unwrap(), out);
    }

    #[test]
    fn frame_count_formula(len_ms in 25.0f64..3000.0, frame_ms in 5.0f64..100.0, hop_ms in 1.0f64..20.0) {
        prop_assume!(hop_ms <= frame_ms && len_ms >= frame_ms);
        let fs = 8000u32;
        let len = (len_ms * fs as f64 / 1000.0) as usize;
        let buf = SampleBuffer::new(vec![0.1; len], fs).unwrap();
        let spec = FrameSpec::new(frame_ms, hop_ms, Window::Rectangular).unwrap();
        let frame_len = buf.ms_to_samples(frame_ms);
        let hop = buf.ms_to_samples(hop_ms);
        prop_assume!(hop >= 1 && len >= frame_len);
        let frames = frame_signal(&buf, &spec).unwrap();
        prop_assert_eq!(frames.len(), (len - frame_len) / hop + 1);
        prop_assert_eq!(spec.frame_count(len, fs), frames.len());
    }
}
