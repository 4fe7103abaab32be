use pro_f0::estimators::EstimatorKind;
use pro_f0::eval::manifest::{load_corpus, write_manifest, ManifestEntry};
use pro_f0::eval::synth::{synthesize_utterance, SynthUtteranceSpec};
use pro_f0::pro::{analyze_utterance, pro_pipeline, PipelineConfig, Region};
use pro_f0::signal::write_wav_pcm16;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

#[test]
fn corpus_round_trips_through_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let mut entries = Vec::new();
    for f0 in [120.0, 280.0] {
        let u = synthesize_utterance(&SynthUtteranceSpec::flat(f0, 500.0, 8000)).unwrap();
        let wav = dir.path().join(format!("v{f0}.wav"));
        let f0_path = dir.path().join(format!("v{f0}.f0"));
        write_wav_pcm16(&wav, &u.audio).unwrap();
        u.truth.write_reference(&f0_path).unwrap();
        entries.push(ManifestEntry { wav, f0: f0_path });
    }
    let manifest = dir.path().join("corpus.txt");
    write_manifest(&manifest, &entries).unwrap();
    let text = std::fs::read_to_string(&manifest).unwrap();
    assert!(text.starts_with("v120.wav v120.f0"), "{text}");

    let corpus = load_corpus(&manifest).unwrap();
    assert_eq!(corpus.len(), 2);
    assert_eq!(corpus[0].name, "v120");
    assert_eq!(corpus[1].truth.f0_hz.iter().flatten().next(), Some(&280.0));
}

#[test]
fn clean_vowels_track_and_separate() {
    for (f0, region) in [(120.0, Region::Low), (280.0, Region::High)] {
        let u = synthesize_utterance(&SynthUtteranceSpec::flat(f0, 600.0, 8000)).unwrap();
        let cfg = PipelineConfig::default();
        let track = pro_pipeline(&u.audio, EstimatorKind::Hht, &cfg).unwrap();
        let voiced: Vec<f64> = track.f0_hz.iter().flatten().copied().collect();
        assert!(!voiced.is_empty());
        let m = median(voiced);
        assert!((m - f0).abs() <= 0.2 * f0, "{f0}: median {m}");

        let analysis = analyze_utterance(&u.audio, &[EstimatorKind::Hht], &cfg).unwrap();
        let regions = analysis.regions.unwrap();
        let right = regions.iter().filter(|r| r.region == region).count();
        assert!(
            right * 10 >= regions.len() * 9,
            "{f0}: {right}/{}",
            regions.len()
        );
    }
}
