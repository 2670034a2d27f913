use super::FormantTarget;
use crate::harmony::Vowel;

/// Design formant targets (F1–F4) per vowel.
///
/// These are synthesis settings checked by the extraction round trip, not
/// measured norms: +ATR vowels sit lower in F1 than their −ATR partners.
pub fn canonical_targets(v: Vowel) -> [FormantTarget; 4] {
    let (f1, f2, f3) = match v {
        Vowel::I => (300.0, 2200.0, 2800.0),
        Vowel::E => (420.0, 2000.0, 2650.0),
        Vowel::OpenE => (600.0, 1800.0, 2550.0),
        Vowel::A => (750.0, 1300.0, 2500.0),
        Vowel::OpenO => (550.0, 900.0, 2450.0),
        Vowel::O => (430.0, 820.0, 2400.0),
        Vowel::Upsilon => (420.0, 1050.0, 2350.0),
        Vowel::U => (350.0, 800.0, 2300.0),
    };
    [
        FormantTarget::new(f1, 60.0),
        FormantTarget::new(f2, 90.0),
        FormantTarget::new(f3, 120.0),
        FormantTarget::new(3500.0, 180.0),
    ]
}
