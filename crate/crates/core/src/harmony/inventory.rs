//! The eight surface vowels of (Upper) Assamese and their features.
//!
//! Labels use an ASCII transliteration so CSV files and TextGrid tiers stay
//! encoding-safe:
//!
//! | ASCII | IPA | height | backness | ATR  |
//! |-------|-----|--------|----------|------|
//! | `i`   | i   | high   | front    | +ATR |
//! | `u`   | u   | high   | back     | +ATR |
//! | `U`   | ʊ   | high   | back     | −ATR |
//! | `e`   | e   | mid    | front    | +ATR |
//! | `o`   | o   | mid    | back     | +ATR |
//! | `E`   | ε   | mid    | front    | −ATR |
//! | `O`   | ɔ   | mid    | back     | −ATR |
//! | `a`   | ɑ   | low    | back     | −ATR (opaque) |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Vowel {
    I,
    E,
    OpenE,
    A,
    OpenO,
    O,
    Upsilon,
    U,
}

impl Vowel {
    pub const ALL: [Vowel; 8] = [
        Vowel::I,
        Vowel::E,
        Vowel::OpenE,
        Vowel::A,
        Vowel::OpenO,
        Vowel::O,
        Vowel::Upsilon,
        Vowel::U,
    ];

    /// ASCII label used in tiers, CSV files and coefficient names.
    pub fn symbol(self) -> &'static str {
        match self {
            Vowel::I => "i",
            Vowel::E => "e",
            Vowel::OpenE => "E",
            Vowel::A => "a",
            Vowel::OpenO => "O",
            Vowel::O => "o",
            Vowel::Upsilon => "U",
            Vowel::U => "u",
        }
    }

    pub fn ipa(self) -> char {
        match self {
            Vowel::I => 'i',
            Vowel::E => 'e',
            Vowel::OpenE => 'ε',
            Vowel::A => 'ɑ',
            Vowel::OpenO => 'ɔ',
            Vowel::O => 'o',
            Vowel::Upsilon => 'ʊ',
            Vowel::U => 'u',
        }
    }

    pub fn from_symbol(s: &str) -> Option<Vowel> {
        Vowel::ALL.into_iter().find(|v| v.symbol() == s)
    }
}

impl fmt::Display for Vowel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Vowel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Vowel::from_symbol(s).ok_or_else(|| format!("'{s}' is not a vowel symbol"))
    }
}

impl TryFrom<String> for Vowel {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Vowel> for String {
    fn from(v: Vowel) -> String {
        v.symbol().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Height {
    High,
    Mid,
    Low,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backness {
    Front,
    Back,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Atr {
    #[serde(rename = "+ATR")]
    Plus,
    #[serde(rename = "-ATR")]
    Minus,
}

impl fmt::Display for Atr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Atr::Plus => "+ATR",
            Atr::Minus => "-ATR",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VowelFeatures {
    pub height: Height,
    pub backness: Backness,
    pub atr: Atr,
    pub opaque: bool,
}

/// Feature table keyed by vowel.
#[derive(Debug, Clone, PartialEq)]
pub struct VowelInventory {
    features: BTreeMap<Vowel, VowelFeatures>,
}

impl Default for VowelInventory {
    fn default() -> Self {
        Self::assamese()
    }
}

impl VowelInventory {
    pub fn assamese() -> Self {
        use Atr::*;
        use Backness::*;
        use Height::*;
        let row = |height, backness, atr, opaque| VowelFeatures {
            height,
            backness,
            atr,
            opaque,
        };
        let features = BTreeMap::from([
            (Vowel::I, row(High, Front, Plus, false)),
            (Vowel::U, row(High, Back, Plus, false)),
            (Vowel::Upsilon, row(High, Back, Minus, false)),
            (Vowel::E, row(Mid, Front, Plus, false)),
            (Vowel::O, row(Mid, Back, Plus, false)),
            (Vowel::OpenE, row(Mid, Front, Minus, false)),
            (Vowel::OpenO, row(Mid, Back, Minus, false)),
            (Vowel::A, row(Low, Back, Minus, true)),
        ]);
        Self { features }
    }

    pub fn features(&self, v: Vowel) -> Option<&VowelFeatures> {
        self.features.get(&v)
    }

    pub fn contains(&self, v: Vowel) -> bool {
        self.features.contains_key(&v)
    }

    /// Resolves a tier label (already trimmed) to an inventory vowel.
    pub fn lookup(&self, label: &str) -> Option<Vowel> {
        Vowel::from_symbol(label).filter(|v| self.contains(*v))
    }

    pub fn vowels(&self) -> impl Iterator<Item = Vowel> + '_ {
        self.features.keys().copied()
    }

    pub fn atr_of(&self, v: Vowel) -> Option<Atr> {
        self.features(v).map(|f| f.atr)
    }

    pub fn is_opaque(&self, v: Vowel) -> bool {
        self.features(v).is_some_and(|f| f.opaque)
    }

    /// High +ATR vowels, the harmony triggers.
    pub fn triggers(&self) -> Vec<Vowel> {
        self.features
            .iter()
            .filter(|(_, f)| f.height == Height::High && f.atr == Atr::Plus)
            .map(|(v, _)| *v)
            .collect()
    }
}

/// ATR value of `v` in the Assamese inventory.
pub fn atr_of(v: Vowel) -> Atr {
    match v {
        Vowel::I | Vowel::U | Vowel::E | Vowel::O => Atr::Plus,
        Vowel::Upsilon | Vowel::OpenE | Vowel::OpenO | Vowel::A => Atr::Minus,
    }
}
