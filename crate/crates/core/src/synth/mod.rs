//! Cascade formant synthesizer used as ground truth for the measurement and
//! statistics layers.
//!
//! Each vowel is an impulse train at its f0, low-passed twice (−12 dB/octave
//! tilt) and run through a cascade of two-pole resonators. Vowels are
//! separated by a low-level white-noise burst standing in for the
//! consonant, and every token comes with a TextGrid marking each interval.

mod corpus;
mod resonator;
mod targets;
mod token;

pub use corpus::{
    generate_corpus, CorpusParams, HarmonyRule, SynthCorpus, SynthManifest,
    TokenTruth, MIN_SHIFTED_F1,
};
pub use resonator::{resonator, Resonator};
pub use targets::canonical_targets;
pub use token::{
    synthesize_token, Placement, RenderedToken, TokenSpec, VowelSpec, VowelTruth, DEFAULT_TIER,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid synthesis spec: {0}")]
    InvalidSpec(String),
    #[error("audio: {0}")]
    Audio(String),
    #[error("textgrid: {0}")]
    TextGrid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormantTarget {
    pub frequency: f64,
    pub bandwidth: f64,
}

impl FormantTarget {
    pub const fn new(frequency: f64, bandwidth: f64) -> Self {
        Self {
            frequency,
            bandwidth,
        }
    }
}
