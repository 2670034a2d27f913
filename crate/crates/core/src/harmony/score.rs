use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{atr_of, Atr, HarmonyError, Vowel, VowelPairObservation};

/// Default F1 margin for calling a V1 raised, Hz.
pub const DEFAULT_MARGIN_HZ: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonyScore {
    /// V2 is +ATR and V1's F1 sits more than the margin below its reference.
    pub raised: bool,
    /// Reference F1 minus observed F1 of V1, Hz.
    pub score: f64,
}

/// Per-vowel mean F1 of V1 over pairs whose V2 is −ATR.
pub fn reference_means(pairs: &[VowelPairObservation]) -> BTreeMap<Vowel, f64> {
    let mut acc: BTreeMap<Vowel, (f64, usize)> = BTreeMap::new();
    for p in pairs.iter().filter(|p| atr_of(p.v2) == Atr::Minus) {
        let e = acc.entry(p.v1).or_default();
        e.0 += p.f1v1;
        e.1 += 1;
    }
    acc.into_iter().map(|(v, (s, n))| (v, s / n as f64)).collect()
}

pub fn harmony_score(
    pair: &VowelPairObservation,
    reference: &BTreeMap<Vowel, f64>,
    margin: f64,
) -> Result<HarmonyScore, HarmonyError> {
    let r = *reference
        .get(&pair.v1)
        .ok_or(HarmonyError::MissingReference(pair.v1))?;
    Ok(HarmonyScore {
        raised: atr_of(pair.v2) == Atr::Plus && pair.f1v1 < r - margin,
        score: r - pair.f1v1,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreCell {
    pub pairs: usize,
    pub raised: usize,
    pub raised_rate: f64,
    pub mean_score: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreSummary {
    pub margin: f64,
    pub reference_means: BTreeMap<Vowel, f64>,
    /// Broken down by V2.
    pub by_v2: BTreeMap<Vowel, ScoreCell>,
    pub before_triggers: ScoreCell,
    pub before_other_plus_atr: ScoreCell,
    pub before_minus_atr: ScoreCell,
    /// Pairs skipped because V1 had no reference mean.
    pub unscored: usize,
}

fn cell(scores: &[HarmonyScore]) -> ScoreCell {
    let n = scores.len();
    let raised = scores.iter().filter(|s| s.raised).count();
    ScoreCell {
        pairs: n,
        raised,
        raised_rate: if n == 0 { 0.0 } else { raised as f64 / n as f64 },
        mean_score: if n == 0 {
            0.0
        } else {
            scores.iter().map(|s| s.score).sum::<f64>() / n as f64
        },
    }
}

/// Scores every pair against the corpus's own reference means.
pub fn score_summary(pairs: &[VowelPairObservation], triggers: &[Vowel], margin: f64) -> ScoreSummary {
    let reference = reference_means(pairs);
    let mut by_v2: BTreeMap<Vowel, Vec<HarmonyScore>> = BTreeMap::new();
    let (mut trig, mut plus, mut minus) = (Vec::new(), Vec::new(), Vec::new());
    let mut unscored = 0;
    for p in pairs {
        let Ok(s) = harmony_score(p, &reference, margin) else {
            unscored += 1;
            continue;
        };
        by_v2.entry(p.v2).or_default().push(s);
        if triggers.contains(&p.v2) {
            trig.push(s);
        } else if atr_of(p.v2) == Atr::Plus {
            plus.push(s);
        } else {
            minus.push(s);
        }
    }
    ScoreSummary {
        margin,
        reference_means: reference,
        by_v2: by_v2.into_iter().map(|(v, s)| (v, cell(&s))).collect(),
        before_triggers: cell(&trig),
        before_other_plus_atr: cell(&plus),
        before_minus_atr: cell(&minus),
        unscored,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmony::Source;

    fn pair(v1: Vowel, v2: Vowel, f1v1: f64) -> VowelPairObservation {
        VowelPairObservation {
            token_id: "t".into(),
            word: "w".into(),
            v1,
            v2,
            f1v1,
            f1v2: 400.0,
            f2v1: 1500.0,
            f2v2: 1500.0,
            position: 1,
            distance: 1,
            opaque: false,
            source: Source::Training,
        }
    }

    #[test]
    fn raised_before_plus_atr() {
        let refs = BTreeMap::from([(Vowel::OpenE, 600.0)]);
        let s = harmony_score(&pair(Vowel::OpenE, Vowel::U, 450.0), &refs, 40.0).unwrap();
        assert!(s.raised);
        assert_eq!(s.score, 150.0);
    }

    #[test]
    fn never_raised_before_minus_atr() {
        let refs = BTreeMap::from([(Vowel::OpenE, 600.0)]);
        for f1 in [100.0, 450.0, 900.0] {
            assert!(!harmony_score(&pair(Vowel::OpenE, Vowel::A, f1), &refs, 40.0).unwrap().raised);
        }
    }

    #[test]
    fn missing_reference() {
        assert_eq!(
            harmony_score(&pair(Vowel::O, Vowel::U, 400.0), &BTreeMap::new(), 40.0),
            Err(HarmonyError::MissingReference(Vowel::O))
        );
    }

    #[test]
    fn references_use_minus_atr_contexts_only() {
        let pairs = [
            pair(Vowel::OpenE, Vowel::A, 600.0),
            pair(Vowel::OpenE, Vowel::OpenO, 620.0),
            pair(Vowel::OpenE, Vowel::I, 450.0),
        ];
        let r = reference_means(&pairs);
        assert_eq!(r[&Vowel::OpenE], 610.0);
        let summary = score_summary(&pairs, &[Vowel::I, Vowel::U], 40.0);
        assert_eq!(summary.before_triggers.raised, 1);
        assert_eq!(summary.before_minus_atr.raised_rate, 0.0);
    }
}
