use harmonium::audio::{read_wav_bytes, write_wav_bytes};
use harmonium::formants::{track_formants, FormantConfig, FormantError};
use harmonium::synth::{synthesize_token, FormantTarget, TokenSpec, VowelSpec};
use harmonium::{AudioBuffer, Vowel, VowelSegment};

fn targets(f: [f64; 4]) -> Vec<FormantTarget> {
    let bw = [60.0, 90.0, 120.0, 180.0];
    f.iter().zip(bw).map(|(&f, b)| FormantTarget::new(f, b)).collect()
}

fn render(vowel: VowelSpec) -> AudioBuffer {
    let spec = TokenSpec {
        token_id: "t".into(),
        vowels: vec![vowel],
        gap: 0.04,
        sample_rate: 16000,
        noise_seed: 3,
        consonant: "t".into(),
    };
    let audio = synthesize_token(&spec).unwrap().audio;
    read_wav_bytes(&write_wav_bytes(&audio).unwrap()).unwrap()
}

fn segment(label: Vowel, end: f64) -> VowelSegment {
    VowelSegment {
        label,
        start: 0.0,
        end,
        token_id: "t".into(),
    }
}

#[test]
fn steady_open_back_vowel() {
    let audio = render(VowelSpec::steady(Vowel::A, 100.0, 0.2, targets([700.0, 1100.0, 2500.0, 3500.0])));
    let t = track_formants(&audio, &segment(Vowel::A, 0.2), &FormantConfig::default()).unwrap();
    let (f1, f2) = (t.mean_f1.unwrap(), t.mean_f2.unwrap());
    assert!((f1 - 700.0).abs() <= 35.0, "F1 {f1}");
    assert!((f2 - 1100.0).abs() <= 55.0, "F2 {f2}");
    assert!(t.reliable);
}

#[test]
fn f1_glide_averages_to_midpoint() {
    let mut v = VowelSpec::steady(Vowel::E, 100.0, 0.25, targets([400.0, 2000.0, 2650.0, 3500.0]));
    v.end_targets = Some(targets([600.0, 2000.0, 2650.0, 3500.0]));
    let audio = render(v);
    let t = track_formants(&audio, &segment(Vowel::E, 0.25), &FormantConfig::default()).unwrap();
    let f1 = t.mean_f1.unwrap();
    assert!((f1 - 500.0).abs() <= 30.0, "F1 {f1}");
    let points: Vec<f64> = t.f1_points().into_iter().flatten().collect();
    assert!(points.first().unwrap() < points.last().unwrap());
}

#[test]
fn silence_is_an_unreliable_track() {
    let audio = AudioBuffer::new(vec![0.0; 8000], 16000).unwrap();
    let err = track_formants(&audio, &segment(Vowel::A, 0.3), &FormantConfig::default()).unwrap_err();
    assert!(matches!(err, FormantError::UnreliableTrack { .. }));
}

#[test]
fn amplitude_scaling_leaves_formants_unchanged() {
    let audio = render(VowelSpec::steady(Vowel::O, 105.0, 0.2, targets([430.0, 820.0, 2400.0, 3500.0])));
    let cfg = FormantConfig::default();
    let base = track_formants(&audio, &segment(Vowel::O, 0.2), &cfg).unwrap();
    for c in [0.01, 0.37, 2.5, 1e3] {
        let scaled = AudioBuffer::new(audio.samples().iter().map(|s| s * c).collect(), 16000).unwrap();
        let t = track_formants(&scaled, &segment(Vowel::O, 0.2), &cfg).unwrap();
        for (a, b) in base.frames.iter().zip(&t.frames) {
            assert_eq!(a.formants.len(), b.formants.len());
            for (x, y) in a.formants.iter().zip(&b.formants) {
                assert!((x.frequency - y.frequency).abs() <= 1e-6 * x.frequency, "c={c}");
                assert!((x.bandwidth - y.bandwidth).abs() <= 1e-6 * x.bandwidth.max(1.0), "c={c}");
            }
        }
    }
}

#[test]
fn frequencies_inside_analysis_band() {
    let cfg = FormantConfig::default();
    let nyquist = cfg.analysis_rate() as f64 / 2.0;
    for v in Vowel::ALL {
        let audio = render(VowelSpec::steady(v, 100.0, 0.2, harmonium::synth::canonical_targets(v).to_vec()));
        let t = track_formants(&audio, &segment(v, 0.2), &cfg).unwrap();
        for f in t.frames.iter().flat_map(|fr| &fr.formants) {
            assert!(f.frequency > 0.0 && f.frequency < nyquist);
        }
    }
}
