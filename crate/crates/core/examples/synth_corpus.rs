//! Draws a small regressive-harmony corpus and shows the injected F1 shift
//! in the ground truth.
//!
//! cargo run --example synth_corpus

use harmonium::synth::{canonical_targets, generate_corpus, CorpusParams, HarmonyRule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = CorpusParams {
        n_tokens: 16,
        lexicon_size: Some(16),
        rule: HarmonyRule::Regressive,
        noise_sd: 0.0,
        ..CorpusParams::default()
    };
    let corpus = generate_corpus(&params)?;
    for t in &corpus.manifest.tokens {
        let v1 = &t.vowels[0];
        let canonical = canonical_targets(v1.label)[0].frequency;
        println!(
            "{} {:>5} harmonic={:<5} V1 {} F1 target {:4.0} (canonical {:4.0})",
            t.token_id, t.word, t.harmonic, v1.label, v1.f1, canonical
        );
    }
    let rendered = corpus.render()?;
    let seconds: f64 = rendered.iter().map(|r| r.audio.duration()).sum();
    println!("rendered {} tokens, {seconds:.2} s of audio", rendered.len());
    Ok(())
}
