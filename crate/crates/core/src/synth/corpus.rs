use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::token::{synthesize_token, RenderedToken, TokenSpec, VowelSpec, VowelTruth};
use super::{canonical_targets, FormantTarget, SynthError};
use crate::harmony::{atr_of, Vowel};

/// Floor for a harmony-lowered F1 target, Hz.
pub const MIN_SHIFTED_F1: f64 = 200.0;

const CONSONANTS: [&str; 8] = ["t", "k", "p", "s", "b", "d", "g", "m"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HarmonyRule {
    None,
    /// A trigger lowers the F1 of the vowel before it.
    Regressive,
    /// A trigger lowers the F1 of the vowel after it.
    Progressive,
}

impl std::fmt::Display for HarmonyRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            HarmonyRule::None => "none",
            HarmonyRule::Regressive => "regressive",
            HarmonyRule::Progressive => "progressive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusParams {
    pub seed: u64,
    pub n_tokens: usize,
    pub rule: HarmonyRule,
    /// F1 lowering applied to harmony targets, Hz.
    pub shift: f64,
    /// SD of the Gaussian jitter added to every F1–F3 target, Hz.
    pub noise_sd: f64,
    pub triggers: Vec<Vowel>,
    pub vowels_per_token: usize,
    /// Distinct words; tokens cycle through them. Defaults to n_tokens/5.
    pub lexicon_size: Option<usize>,
    pub sample_rate: u32,
    pub f0_min: f64,
    pub f0_max: f64,
    pub duration_min: f64,
    pub duration_max: f64,
    pub gap: f64,
    pub speaker: String,
    pub source: String,
}

impl Default for CorpusParams {
    fn default() -> Self {
        Self {
            seed: 7,
            n_tokens: 200,
            rule: HarmonyRule::Regressive,
            shift: 150.0,
            noise_sd: 25.0,
            triggers: vec![Vowel::I, Vowel::U],
            vowels_per_token: 2,
            lexicon_size: None,
            sample_rate: 16000,
            f0_min: 90.0,
            f0_max: 110.0,
            duration_min: 0.16,
            duration_max: 0.22,
            gap: 0.04,
            speaker: "synth".into(),
            source: "training".into(),
        }
    }
}

impl CorpusParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::InvalidSpec(m.to_string()));
        if self.n_tokens == 0 {
            return bad("n_tokens must be at least 1");
        }
        if !(self.shift >= 0.0 && self.shift.is_finite()) {
            return bad("shift must be non-negative");
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return bad("noise_sd must be non-negative");
        }
        if self.vowels_per_token == 0 {
            return bad("vowels_per_token must be at least 1");
        }
        if self.lexicon_size == Some(0) {
            return bad("lexicon_size must be at least 1");
        }
        if !(self.f0_min > 0.0 && self.f0_min <= self.f0_max && self.f0_max < 500.0) {
            return bad("f0 range must satisfy 0 < f0_min <= f0_max < 500");
        }
        if !(self.duration_min >= 0.05 && self.duration_min <= self.duration_max) {
            return bad("duration range must satisfy 0.05 <= duration_min <= duration_max");
        }
        if self.sample_rate < 8000 {
            return bad("sample_rate must be at least 8000 Hz");
        }
        Ok(())
    }

    fn lexicon_len(&self) -> usize {
        self.lexicon_size
            .unwrap_or_else(|| (self.n_tokens / 5).clamp(2, 80))
            .min(self.n_tokens)
    }
}

/// Ground truth for one token, as written to the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenTruth {
    pub token_id: String,
    pub word: String,
    pub harmonic: bool,
    pub speaker: String,
    pub source: String,
    pub vowels: Vec<VowelTruth>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthManifest {
    pub params: CorpusParams,
    pub tokens: Vec<TokenTruth>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub specs: Vec<TokenSpec>,
    pub manifest: SynthManifest,
}

impl SynthCorpus {
    /// Renders every token; order follows `specs` regardless of threading.
    pub fn render(&self) -> Result<Vec<RenderedToken>, SynthError> {
        self.specs.par_iter().map(synthesize_token).collect()
    }
}

/// Harmonic when every vowel carries the same ATR value.
fn is_harmonic(vowels: &[Vowel]) -> bool {
    vowels.windows(2).all(|w| atr_of(w[0]) == atr_of(w[1]))
}

/// Index of the vowel a trigger at `k` acts on, if any.
fn harmony_target(rule: HarmonyRule, k: usize, len: usize) -> Option<usize> {
    match rule {
        HarmonyRule::None => None,
        HarmonyRule::Regressive => k.checked_sub(1),
        HarmonyRule::Progressive => (k + 1 < len).then_some(k + 1),
    }
}

/// Draws a deterministic V(CV)* corpus with an optional injected F1 rule.
///
/// Words are drawn first and tokens cycle through them, so each word recurs
/// and the random-intercept grouping has repetitions to work with.
pub fn generate_corpus(params: &CorpusParams) -> Result<SynthCorpus, SynthError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let jitter = Normal::new(0.0, params.noise_sd.max(f64::MIN_POSITIVE))
        .map_err(|e| SynthError::InvalidSpec(e.to_string()))?;

    let lexicon: Vec<(Vec<Vowel>, &str)> = (0..params.lexicon_len())
        .map(|_| {
            let vowels = (0..params.vowels_per_token)
                .map(|_| Vowel::ALL[rng.random_range(0..Vowel::ALL.len())])
                .collect();
            (vowels, CONSONANTS[rng.random_range(0..CONSONANTS.len())])
        })
        .collect();

    let width = params.n_tokens.to_string().len().max(4);
    let mut specs = Vec::with_capacity(params.n_tokens);
    let mut tokens = Vec::with_capacity(params.n_tokens);
    for t in 0..params.n_tokens {
        let (word_vowels, consonant) = &lexicon[t % lexicon.len()];
        let f0 = rng.random_range(params.f0_min..=params.f0_max);
        let mut targets: Vec<[FormantTarget; 4]> =
            word_vowels.iter().map(|&v| canonical_targets(v)).collect();

        for (k, v) in word_vowels.iter().enumerate() {
            if !params.triggers.contains(v) {
                continue;
            }
            if let Some(j) = harmony_target(params.rule, k, word_vowels.len()) {
                let f1 = &mut targets[j][0].frequency;
                *f1 = (*f1 - params.shift).max(MIN_SHIFTED_F1);
            }
        }

        let vowels: Vec<VowelSpec> = word_vowels
            .iter()
            .zip(targets)
            .map(|(&label, mut t)| {
                if params.noise_sd > 0.0 {
                    for f in t.iter_mut().take(3) {
                        f.frequency += jitter.sample(&mut rng);
                    }
                }
                // jitter must not reorder or collapse formants
                t[0].frequency = t[0].frequency.max(MIN_SHIFTED_F1 / 2.0);
                for i in 1..4 {
                    t[i].frequency = t[i].frequency.max(t[i - 1].frequency + 100.0);
                }
                let duration = rng.random_range(params.duration_min..=params.duration_max);
                VowelSpec::steady(label, f0, duration, t.to_vec())
            })
            .collect();

        let spec = TokenSpec {
            token_id: format!("tok{t:0width$}"),
            vowels,
            gap: params.gap,
            sample_rate: params.sample_rate,
            noise_seed: rng.random(),
            consonant: consonant.to_string(),
        };
        let (placements, _) = spec.layout();
        let rate = params.sample_rate as f64;
        let truth = spec
            .vowels
            .iter()
            .zip(&placements)
            .map(|(v, p)| VowelTruth {
                label: v.label,
                start: p.start as f64 / rate,
                end: (p.start + p.len) as f64 / rate,
                f1: v.targets[0].frequency,
                f2: v.targets[1].frequency,
                f3: v.targets[2].frequency,
                f0: v.f0,
                steady: true,
            })
            .collect();
        tokens.push(TokenTruth {
            token_id: spec.token_id.clone(),
            word: spec.word(),
            harmonic: is_harmonic(word_vowels),
            speaker: params.speaker.clone(),
            source: params.source.clone(),
            vowels: truth,
        });
        specs.push(spec);
    }

    Ok(SynthCorpus {
        specs,
        manifest: SynthManifest {
            params: params.clone(),
            tokens,
        },
    })
}
