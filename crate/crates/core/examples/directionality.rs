//! Synthesizes a corpus, measures every vowel and runs the four-row
//! directionality test on the resulting V1CV2 pairs.
//!
//! cargo run --release --example directionality [regressive|progressive|none]

use harmonium::formants::FormantAnalyzer;
use harmonium::harmony::{
    build_pairs, directionality_analysis, DirectionalityConfig, Harmonicity, Source,
    TokenRecord, VowelMeasurement,
};
use harmonium::synth::{generate_corpus, CorpusParams, HarmonyRule, DEFAULT_TIER};
use harmonium::textgrid::extract_vowel_segments;
use harmonium::{FormantConfig, VowelInventory};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rule = match std::env::args().nth(1).as_deref() {
        Some("progressive") => HarmonyRule::Progressive,
        Some("none") => HarmonyRule::None,
        _ => HarmonyRule::Regressive,
    };
    let params = CorpusParams { rule, ..CorpusParams::default() };
    let corpus = generate_corpus(&params)?;
    let inventory = VowelInventory::default();
    let config = FormantConfig::default();

    let mut measurements = Vec::new();
    let mut tokens = Vec::new();
    for (token, truth) in corpus.render()?.iter().zip(&corpus.manifest.tokens) {
        let analyzer = FormantAnalyzer::new(&token.audio, &config)?;
        let found = extract_vowel_segments(&token.grid, DEFAULT_TIER, &inventory, &[], &token.token_id)?;
        for (k, seg) in found.segments.iter().enumerate() {
            if let Ok(track) = analyzer.track(seg) {
                measurements.push(VowelMeasurement::from_track(&track, k + 1));
            }
        }
        tokens.push(TokenRecord {
            token_id: truth.token_id.clone(),
            word: truth.word.clone(),
            harmonic: if truth.harmonic { Harmonicity::Harmonic } else { Harmonicity::NonHarmonic },
            speaker: truth.speaker.clone(),
            source: Source::Training,
        });
    }
    let pairs = build_pairs(&measurements, &tokens, &inventory)?;
    let report = directionality_analysis(&pairs.pairs, &DirectionalityConfig::default())?;

    println!("rule {rule}: {} pairs from {} words", report.n_pairs, report.n_words);
    for row in &report.rows {
        match &row.test {
            Some(t) => println!(
                "  {:?} {:?}: chi2 = {:.2}, df = {}, p = {:.3e}",
                row.direction, row.subset, t.chi2, t.df, t.p_value
            ),
            None => println!("  {:?} {:?}: {}", row.direction, row.subset, row.note.as_deref().unwrap_or("")),
        }
    }
    println!("verdict: {}", report.verdict);
    Ok(())
}
