use pro_f0::emd::{count_zero_crossings, eemd_decompose, eemd_trial, emd_decompose, EmdConfig};
use pro_f0::signal::SampleBuffer;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn rel_err(x: &[f64], y: &[f64]) -> f64 {
    let num: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
    let den: f64 = x.iter().map(|a| a * a).sum();
    (num / den).sqrt()
}

fn noisy_tones(seed: u64, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tones: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.random_range(0.002..0.2),
                rng.random_range(0.1..1.0),
                rng.random_range(0.0..6.0),
            )
        })
        .collect();
    (0..len)
        .map(|i| {
            tones
                .iter()
                .map(|(f, a, p)| a * (2.0 * PI * f * i as f64 + p).sin())
                .sum::<f64>()
                + 0.1 * rng.random_range(-1.0..1.0)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn emd_reconstructs_exactly(seed in any::<u64>(), len in 64usize..3000) {
        let x = noisy_tones(seed, len);
        let set = emd_decompose(&SampleBuffer::new(x.clone(), 8000).unwrap(), &EmdConfig::default()).unwrap();
        prop_assert!(rel_err(&x, &set.reconstruct()) <= 1e-9);
    }

    #[test]
    fn eemd_is_deterministic_and_an_average_of_trials(seed in any::<u64>(), len in 200usize..1200, n in 1usize..6) {
        let x = SampleBuffer::new(noisy_tones(seed, len), 8000).unwrap();
        let cfg = EmdConfig { ensemble_size: n, rng_seed: seed, ..EmdConfig::default() };
        let a = eemd_decompose(&x, &cfg).unwrap();
        prop_assert_eq!(&a, &eemd_decompose(&x, &cfg).unwrap());

        let trials: Vec<_> = (0..n).map(|t| eemd_trial(&x, &cfg, t).unwrap()).collect();
        let modes = trials.iter().map(|t| t.num_imfs()).max().unwrap();
        prop_assert_eq!(a.num_imfs(), modes);
        for k in 0..modes {
            for i in 0..len {
                let mean = trials.iter().map(|t| t.imfs.get(k).map_or(0.0, |m| m[i])).sum::<f64>() / n as f64;
                prop_assert!((a.imfs[k][i] - mean).abs() <= 1e-12);
            }
        }
        for i in 0..len {
            let mean = trials.iter().map(|t| t.residual[i]).sum::<f64>() / n as f64;
            prop_assert!((a.residual[i] - mean).abs() <= 1e-12);
        }
    }

    #[test]
    fn imf_zero_crossing_rates_fall(f1 in 1500.0f64..3000.0, ratio2 in 3.0f64..5.0, ratio3 in 3.0f64..5.0) {
        let fs = 8000.0;
        let (f2, f3) = (f1 / ratio2, f1 / ratio2 / ratio3);
        let x: Vec<f64> = (0..4000)
            .map(|i| {
                let t = i as f64 / fs;
                (2.0 * PI * f1 * t).sin() + (2.0 * PI * f2 * t).sin() + (2.0 * PI * f3 * t).sin()
            })
            .collect();
        let set = emd_decompose(&SampleBuffer::new(x, 8000).unwrap(), &EmdConfig::default()).unwrap();
        let rates: Vec<f64> = set.imfs.iter().map(|m| count_zero_crossings(m) as f64 / m.len() as f64).collect();
        let inversions = rates.windows(2).filter(|w| w[1] > w[0]).count();
        prop_assert!(inversions <= 1, "rates {rates:?}");
    }
}
