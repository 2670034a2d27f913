//! Trigger analysis on generated-item pairs: which following vowel lowers
//! F1 of the preceding one?
//!
//! cargo run --example trigger_table

use harmonium::harmony::{analyze_generated, GeneratedConfig, Source, Vowel, VowelPairObservation};
use harmonium::synth::canonical_targets;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let noise = Normal::new(0.0, 25.0)?;
    // only [i] lowers the preceding vowel
    let pairs: Vec<VowelPairObservation> = (0..240)
        .map(|t| {
            let v1 = Vowel::ALL[rng.random_range(0..8)];
            let v2 = Vowel::ALL[rng.random_range(0..8)];
            let shift = if v2 == Vowel::I { 150.0 } else { 0.0 };
            let f1 = |v: Vowel| canonical_targets(v)[0].frequency;
            VowelPairObservation {
                token_id: format!("g{t:03}"),
                word: format!("{v1}t{v2}"),
                v1,
                v2,
                f1v1: (f1(v1) - shift).max(200.0) + noise.sample(&mut rng),
                f1v2: f1(v2) + noise.sample(&mut rng),
                f2v1: canonical_targets(v1)[1].frequency,
                f2v2: canonical_targets(v2)[1].frequency,
                position: 1,
                distance: 1,
                opaque: v1 == Vowel::A || v2 == Vowel::A,
                source: Source::Generated,
            }
        })
        .collect();

    let report = analyze_generated(&pairs, &GeneratedConfig::default())?;
    println!("{}", report.categorical_shape.formula);
    println!("{:<10} {:>9} {:>8} {:>8} {:>10}", "term", "estimate", "SE", "t", "p");
    for r in &report.triggers {
        println!("{:<10} {:>9.2} {:>8.2} {:>8.2} {:>10.3e}", r.name, r.estimate, r.std_error, r.t_value, r.p_value);
    }
    println!("dominant trigger: {}", report.dominant_trigger.as_deref().unwrap_or("none"));
    println!("{}: R2 = {:.3}", report.numeric_shape.formula, report.numeric_shape.fit.r_squared);
    Ok(())
}
