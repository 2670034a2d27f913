//! Praat TextGrid files in the long text format.
//!
//! Only interval tiers are supported. Input may be UTF-8 (with or without
//! BOM) or UTF-16 with a BOM; output is always UTF-8.

mod parse;
mod write;

pub use parse::{parse_textgrid, parse_textgrid_bytes};
pub use write::serialize_textgrid;

use serde::Serialize;
use thiserror::Error;

use crate::formants::VowelSegment;
use crate::harmony::VowelInventory;

/// Slack allowed when checking that adjacent intervals touch.
pub const CONTIGUITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum TextGridError {
    #[error("encoding error: {0}")]
    Encoding(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: tier '{name}' is a point tier; only interval tiers are supported")]
    PointTier { line: usize, name: String },
    #[error("tier '{tier}', interval {index}: {message}")]
    NonMonotone {
        tier: String,
        index: usize,
        message: String,
    },
    #[error("invalid grid: {0}")]
    Invariant(String),
    #[error("no tier named '{0}'")]
    MissingTier(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interval {
    pub xmin: f64,
    pub xmax: f64,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalTier {
    pub name: String,
    pub xmin: f64,
    pub xmax: f64,
    pub intervals: Vec<Interval>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TextGrid {
    pub xmin: f64,
    pub xmax: f64,
    pub tiers: Vec<IntervalTier>,
}

fn valid_time(t: f64) -> bool {
    t.is_finite() && t >= 0.0
}

impl IntervalTier {
    pub fn validate(&self) -> Result<(), TextGridError> {
        let non_monotone = |index: usize, message: String| TextGridError::NonMonotone {
            tier: self.name.clone(),
            index,
            message,
        };
        if !valid_time(self.xmin) || !valid_time(self.xmax) || self.xmin > self.xmax {
            return Err(TextGridError::Invariant(format!(
                "tier '{}' has invalid span [{}, {}]",
                self.name, self.xmin, self.xmax
            )));
        }
        for (k, iv) in self.intervals.iter().enumerate() {
            let index = k + 1;
            if !valid_time(iv.xmin) || !valid_time(iv.xmax) {
                return Err(non_monotone(index, "times must be finite and non-negative".into()));
            }
            if iv.xmin > iv.xmax {
                return Err(non_monotone(
                    index,
                    format!("xmin {} exceeds xmax {}", iv.xmin, iv.xmax),
                ));
            }
            if iv.xmin < self.xmin - CONTIGUITY_TOLERANCE
                || iv.xmax > self.xmax + CONTIGUITY_TOLERANCE
            {
                return Err(non_monotone(
                    index,
                    format!(
                        "[{}, {}] outside tier span [{}, {}]",
                        iv.xmin, iv.xmax, self.xmin, self.xmax
                    ),
                ));
            }
            if let Some(next) = self.intervals.get(k + 1) {
                if next.xmin < iv.xmax - CONTIGUITY_TOLERANCE {
                    return Err(non_monotone(
                        index + 1,
                        format!("starts at {} before previous end {}", next.xmin, iv.xmax),
                    ));
                }
                if next.xmin > iv.xmax + CONTIGUITY_TOLERANCE {
                    return Err(non_monotone(
                        index + 1,
                        format!("gap between {} and {}", iv.xmax, next.xmin),
                    ));
                }
            }
        }
        Ok(())
    }
}

impl TextGrid {
    pub fn validate(&self) -> Result<(), TextGridError> {
        if !valid_time(self.xmin) || !valid_time(self.xmax) || self.xmin > self.xmax {
            return Err(TextGridError::Invariant(format!(
                "grid span [{}, {}] is invalid",
                self.xmin, self.xmax
            )));
        }
        for tier in &self.tiers {
            tier.validate()?;
            if tier.xmin < self.xmin - CONTIGUITY_TOLERANCE
                || tier.xmax > self.xmax + CONTIGUITY_TOLERANCE
            {
                return Err(TextGridError::Invariant(format!(
                    "tier '{}' span [{}, {}] exceeds grid span [{}, {}]",
                    tier.name, tier.xmin, tier.xmax, self.xmin, self.xmax
                )));
            }
        }
        Ok(())
    }

    pub fn tier(&self, name: &str) -> Option<&IntervalTier> {
        self.tiers.iter().find(|t| t.name == name)
    }
}

/// An interval label that is neither a vowel nor a known consonant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelWarning {
    pub tier: String,
    pub interval: usize,
    pub label: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SegmentExtraction {
    pub segments: Vec<VowelSegment>,
    pub warnings: Vec<LabelWarning>,
}

/// Collects the vowel intervals of `tier_name` in temporal order.
///
/// Labels are trimmed; empty labels and members of `consonants` are skipped
/// silently, anything else that is not an inventory vowel is skipped with a
/// warning. Zero-length vowel intervals are also skipped with a warning.
pub fn extract_vowel_segments(
    grid: &TextGrid,
    tier_name: &str,
    inventory: &VowelInventory,
    consonants: &[String],
    token_id: &str,
) -> Result<SegmentExtraction, TextGridError> {
    let tier = grid
        .tier(tier_name)
        .ok_or_else(|| TextGridError::MissingTier(tier_name.to_string()))?;
    let mut out = SegmentExtraction::default();
    for (k, iv) in tier.intervals.iter().enumerate() {
        let label = iv.text.trim();
        if label.is_empty() || consonants.iter().any(|c| c == label) {
            continue;
        }
        let warn = |reason: &str| LabelWarning {
            tier: tier.name.clone(),
            interval: k + 1,
            label: label.to_string(),
            reason: reason.to_string(),
        };
        match inventory.lookup(label) {
            Some(vowel) if iv.xmax > iv.xmin => out.segments.push(VowelSegment {
                label: vowel,
                start: iv.xmin,
                end: iv.xmax,
                token_id: token_id.to_string(),
            }),
            Some(_) => out.warnings.push(warn("zero-length vowel interval")),
            None => out
                .warnings
                .push(warn("label is neither an inventory vowel nor a known consonant")),
        }
    }
    Ok(out)
}
