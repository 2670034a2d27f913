use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{HarmonyError, Vowel, VowelInventory};
use crate::formants::FormantTrack;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Harmonicity {
    Harmonic,
    NonHarmonic,
}

impl fmt::Display for Harmonicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Harmonicity::Harmonic => "harmonic",
            Harmonicity::NonHarmonic => "non-harmonic",
        })
    }
}

impl FromStr for Harmonicity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "harmonic" | "true" | "yes" | "1" => Ok(Harmonicity::Harmonic),
            "non-harmonic" | "nonharmonic" | "false" | "no" | "0" => Ok(Harmonicity::NonHarmonic),
            other => Err(format!("unknown harmonic label '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Training,
    Generated,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Training => "training",
            Source::Generated => "generated",
        })
    }
}

impl FromStr for Source {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "training" => Ok(Source::Training),
            "generated" => Ok(Source::Generated),
            other => Err(format!("unknown source '{other}'")),
        }
    }
}

/// One recorded (or generated) word token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenRecord {
    pub token_id: String,
    /// Lexical form; tokens sharing it share a random-intercept group.
    pub word: String,
    pub harmonic: Harmonicity,
    pub speaker: String,
    pub source: Source,
}

/// Mean formants of one vowel of one token.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VowelMeasurement {
    pub token_id: String,
    /// 1-based position of the vowel within its token.
    pub vowel_index: usize,
    pub label: Vowel,
    pub start: f64,
    pub end: f64,
    pub mean_f1: Option<f64>,
    pub mean_f2: Option<f64>,
    pub mean_f3: Option<f64>,
    pub reliable: bool,
}

impl VowelMeasurement {
    pub fn from_track(track: &FormantTrack, vowel_index: usize) -> Self {
        Self {
            token_id: track.segment.token_id.clone(),
            vowel_index,
            label: track.segment.label,
            start: track.segment.start,
            end: track.segment.end,
            mean_f1: track.mean_f1,
            mean_f2: track.mean_f2,
            mean_f3: track.mean_f3,
            reliable: track.reliable,
        }
    }

    fn usable(&self) -> Option<(f64, f64)> {
        let ok = |v: Option<f64>| v.filter(|x| x.is_finite() && *x > 0.0);
        if !self.reliable {
            return None;
        }
        Some((ok(self.mean_f1)?, ok(self.mean_f2)?))
    }
}

/// One V1…V2 row: the statistical unit of the directionality tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VowelPairObservation {
    pub token_id: String,
    pub word: String,
    pub v1: Vowel,
    pub v2: Vowel,
    pub f1v1: f64,
    pub f1v2: f64,
    pub f2v1: f64,
    pub f2v2: f64,
    /// 1-based index of V1 within the token.
    pub position: usize,
    /// Vowel steps from V1 to V2 (1 for adjacent vowels).
    pub distance: usize,
    /// Either vowel is opaque.
    pub opaque: bool,
    pub source: Source,
}

impl VowelPairObservation {
    pub fn scaled_f1(&self, c: f64) -> Self {
        Self {
            f1v1: self.f1v1 * c,
            f1v2: self.f1v2 * c,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PairTable {
    pub pairs: Vec<VowelPairObservation>,
    /// Pairs lost because one of their vowels had an unreliable track.
    pub dropped: usize,
}

/// Groups measurements by token (in `tokens` order) and orders each group
/// by vowel index, checking that time order agrees.
fn grouped<'a>(
    measurements: &'a [VowelMeasurement],
    tokens: &'a [TokenRecord],
) -> Result<Vec<(&'a TokenRecord, Vec<&'a VowelMeasurement>)>, HarmonyError> {
    let index: HashMap<&str, usize> = tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (t.token_id.as_str(), i))
        .collect();
    if index.len() != tokens.len() {
        return Err(HarmonyError::TokenMismatch("duplicate token ids".into()));
    }
    let mut by_token: BTreeMap<usize, Vec<&VowelMeasurement>> = BTreeMap::new();
    for m in measurements {
        let &i = index.get(m.token_id.as_str()).ok_or_else(|| {
            HarmonyError::TokenMismatch(format!("measurement for unknown token '{}'", m.token_id))
        })?;
        by_token.entry(i).or_default().push(m);
    }
    let mut out = Vec::with_capacity(by_token.len());
    for (i, mut vowels) in by_token {
        vowels.sort_by_key(|m| m.vowel_index);
        if vowels.windows(2).any(|w| w[0].vowel_index == w[1].vowel_index) {
            return Err(HarmonyError::TokenMismatch(format!(
                "token '{}' repeats a vowel index",
                tokens[i].token_id
            )));
        }
        if vowels.windows(2).any(|w| w[0].start >= w[1].start) {
            return Err(HarmonyError::TokenMismatch(format!(
                "token '{}': vowel order disagrees with segment times",
                tokens[i].token_id
            )));
        }
        out.push((&tokens[i], vowels));
    }
    Ok(out)
}

/// Pairs every vowel with the one `distance` steps to its right.
pub fn build_distance_pairs(
    measurements: &[VowelMeasurement],
    tokens: &[TokenRecord],
    inventory: &VowelInventory,
    distance: usize,
) -> Result<PairTable, HarmonyError> {
    if distance == 0 {
        return Err(HarmonyError::InsufficientData("pair distance must be at least 1".into()));
    }
    let mut table = PairTable::default();
    for (token, vowels) in grouped(measurements, tokens)? {
        for (k, window) in vowels.windows(distance + 1).enumerate() {
            let (a, b) = (window[0], window[distance]);
            match (a.usable(), b.usable()) {
                (Some((f1a, f2a)), Some((f1b, f2b))) => table.pairs.push(VowelPairObservation {
                    token_id: token.token_id.clone(),
                    word: token.word.clone(),
                    v1: a.label,
                    v2: b.label,
                    f1v1: f1a,
                    f1v2: f1b,
                    f2v1: f2a,
                    f2v2: f2b,
                    position: k + 1,
                    distance,
                    opaque: inventory.is_opaque(a.label) || inventory.is_opaque(b.label),
                    source: token.source,
                }),
                _ => table.dropped += 1,
            }
        }
    }
    Ok(table)
}

/// Adjacent V1CV2 pairs; chained pairs capture iterative spreading.
pub fn build_pairs(
    measurements: &[VowelMeasurement],
    tokens: &[TokenRecord],
    inventory: &VowelInventory,
) -> Result<PairTable, HarmonyError> {
    build_distance_pairs(measurements, tokens, inventory, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn token(id: &str, word: &str) -> TokenRecord {
        TokenRecord {
            token_id: id.into(),
            word: word.into(),
            harmonic: Harmonicity::Harmonic,
            speaker: "s".into(),
            source: Source::Training,
        }
    }

    fn m(id: &str, index: usize, label: Vowel, f1: f64) -> VowelMeasurement {
        VowelMeasurement {
            token_id: id.into(),
            vowel_index: index,
            label,
            start: index as f64 * 0.3,
            end: index as f64 * 0.3 + 0.2,
            mean_f1: Some(f1),
            mean_f2: Some(1500.0),
            mean_f3: Some(2500.0),
            reliable: true,
        }
    }

    #[test]
    fn two_vowel_token_gives_one_pair() {
        let inv = VowelInventory::default();
        let t = build_pairs(
            &[m("t1", 1, Vowel::OpenE, 600.0), m("t1", 2, Vowel::U, 350.0)],
            &[token("t1", "Etu")],
            &inv,
        )
        .unwrap();
        assert_eq!(t.pairs.len(), 1);
        let p = &t.pairs[0];
        assert_eq!((p.v1, p.v2, p.f1v1, p.f1v2), (Vowel::OpenE, Vowel::U, 600.0, 350.0));
        assert_eq!(p.word, "Etu");
    }

    #[test]
    fn single_vowel_gives_none() {
        let inv = VowelInventory::default();
        let t = build_pairs(&[m("t1", 1, Vowel::I, 300.0)], &[token("t1", "i")], &inv).unwrap();
        assert!(t.pairs.is_empty());
        assert_eq!(t.dropped, 0);
    }

    #[test]
    fn chained_pairs() {
        let inv = VowelInventory::default();
        let ms = [
            m("t1", 3, Vowel::I, 300.0),
            m("t1", 1, Vowel::OpenO, 550.0),
            m("t1", 2, Vowel::O, 430.0),
        ];
        let t = build_pairs(&ms, &[token("t1", "OtoDi")], &inv).unwrap();
        let labels: Vec<(Vowel, Vowel)> = t.pairs.iter().map(|p| (p.v1, p.v2)).collect();
        assert_eq!(labels, [(Vowel::OpenO, Vowel::O), (Vowel::O, Vowel::I)]);
        let far = build_distance_pairs(&ms, &[token("t1", "OtoDi")], &inv, 2).unwrap();
        assert_eq!(far.pairs.len(), 1);
        assert_eq!((far.pairs[0].v1, far.pairs[0].v2), (Vowel::OpenO, Vowel::I));
    }

    #[test]
    fn unreliable_tracks_drop_their_pairs() {
        let inv = VowelInventory::default();
        let mut bad = m("t1", 2, Vowel::O, 430.0);
        bad.reliable = false;
        let ms = [m("t1", 1, Vowel::OpenO, 550.0), bad, m("t1", 3, Vowel::I, 300.0)];
        let t = build_pairs(&ms, &[token("t1", "w")], &inv).unwrap();
        assert!(t.pairs.is_empty());
        assert_eq!(t.dropped, 2);
    }

    #[test]
    fn mismatches_are_errors() {
        let inv = VowelInventory::default();
        assert!(build_pairs(&[m("zz", 1, Vowel::I, 300.0)], &[token("t1", "w")], &inv).is_err());
        let mut late = m("t1", 1, Vowel::I, 300.0);
        late.start = 5.0;
        assert!(build_pairs(&[late, m("t1", 2, Vowel::U, 350.0)], &[token("t1", "w")], &inv).is_err());
    }

    #[test]
    fn opaque_pairs_are_flagged() {
        let inv = VowelInventory::default();
        let t = build_pairs(
            &[m("t1", 1, Vowel::A, 750.0), m("t1", 2, Vowel::I, 300.0)],
            &[token("t1", "ati")],
            &inv,
        )
        .unwrap();
        assert!(t.pairs[0].opaque);
    }

    #[test]
    fn label_round_trips() {
        for h in [Harmonicity::Harmonic, Harmonicity::NonHarmonic] {
            assert_eq!(h.to_string().parse::<Harmonicity>().unwrap(), h);
        }
        for s in [Source::Training, Source::Generated] {
            assert_eq!(s.to_string().parse::<Source>().unwrap(), s);
        }
    }
}
