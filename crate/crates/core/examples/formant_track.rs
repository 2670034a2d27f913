//! Synthesizes one vowel with known formants and measures it.
//!
//! cargo run --example formant_track [vowel]

use harmonium::formants::{track_formants, FormantConfig};
use harmonium::synth::{canonical_targets, synthesize_token, TokenSpec, VowelSpec};
use harmonium::{Vowel, VowelSegment};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vowel: Vowel = std::env::args().nth(1).as_deref().unwrap_or("a").parse()?;
    let targets = canonical_targets(vowel);
    let spec = TokenSpec {
        token_id: "demo".into(),
        vowels: vec![VowelSpec::steady(vowel, 100.0, 0.2, targets.to_vec())],
        gap: 0.04,
        sample_rate: 16000,
        noise_seed: 1,
        consonant: "t".into(),
    };
    let token = synthesize_token(&spec)?;
    let truth = &token.vowels[0];
    let segment = VowelSegment { label: vowel, start: truth.start, end: truth.end, token_id: "demo".into() };

    let track = track_formants(&token.audio, &segment, &FormantConfig::default())?;
    println!("vowel {vowel}: target F1 {:.0} F2 {:.0} F3 {:.0}", truth.f1, truth.f2, truth.f3);
    for frame in &track.frames {
        let f: Vec<String> = frame.formants.iter().take(3).map(|f| format!("{:7.1}", f.frequency)).collect();
        println!("  t = {:.3} s  {}", frame.time, f.join(" "));
    }
    println!(
        "mean F1 {:.1}  F2 {:.1}  F3 {:.1}  ({} of 10 frames valid)",
        track.mean_f1.unwrap_or(f64::NAN),
        track.mean_f2.unwrap_or(f64::NAN),
        track.mean_f3.unwrap_or(f64::NAN),
        track.valid_frames
    );
    Ok(())
}
