use std::collections::{BTreeMap, BTreeSet};

use log::warn;
use serde::{Deserialize, Serialize};

use super::{atr_of, Atr, HarmonyError, VowelPairObservation};
use crate::stats::{
    build_design, likelihood_ratio_test, lmm_fit_ml, t_two_sided, Formula, LmmFit, StatsError,
    Table,
};

/// Label given to merged sparse factor levels.
pub const OTHER_LEVEL: &str = "other";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DirectionalityConfig {
    /// Significance level for the verdict.
    pub alpha: f64,
    /// Levels with fewer observations are merged into "other".
    pub min_level_count: usize,
    /// Reference level per factor (`V1`, `V2`); ASCII-first when absent.
    pub reference_levels: BTreeMap<String, String>,
    /// Also run the four rows without pairs touching an opaque vowel.
    pub opaque_rerun: bool,
}

impl Default for DirectionalityConfig {
    fn default() -> Self {
        Self {
            alpha: 0.001,
            min_level_count: 2,
            reference_levels: BTreeMap::new(),
            opaque_rerun: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// V2 predicts V1 (regressive spreading).
    RightToLeft,
    /// V1 predicts V2 (progressive spreading).
    LeftToRight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subset {
    Whole,
    /// Pairs whose predicting vowel is +ATR.
    PlusAtr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Regressive,
    Progressive,
    None,
    Both,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Regressive => "regressive",
            Verdict::Progressive => "progressive",
            Verdict::None => "none",
            Verdict::Both => "both",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub name: String,
    pub estimate: f64,
    #[serde(with = "crate::stats::float_serde")]
    pub std_error: f64,
    #[serde(with = "crate::stats::float_serde")]
    pub t_value: f64,
    pub df: usize,
    #[serde(with = "crate::stats::float_serde")]
    pub p_value: f64,
}

/// Diagnostics of one mixed-model fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub formula: String,
    pub loglik: f64,
    pub aic: f64,
    pub k: usize,
    pub sigma2: f64,
    pub sigma_b2: f64,
    pub theta: f64,
    pub iterations: usize,
    pub bracket: (f64, f64),
    pub n_groups: usize,
}

impl FitSummary {
    fn new(formula: &Formula, fit: &LmmFit) -> Self {
        Self {
            formula: formula.to_string(),
            loglik: fit.loglik,
            aic: fit.aic,
            k: fit.k,
            sigma2: fit.sigma2,
            sigma_b2: fit.sigma_b2,
            theta: fit.theta,
            iterations: fit.iterations,
            bracket: fit.bracket,
            n_groups: fit.n_groups,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowTest {
    pub df: usize,
    pub chi2: f64,
    pub p_value: f64,
    pub aic_full: f64,
    pub aic_null: f64,
    pub full: FitSummary,
    pub null: FitSummary,
    /// Coefficients of the cross-position factor in the full model.
    pub coefficients: Vec<CoefficientRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalityRow {
    pub direction: Direction,
    pub subset: Subset,
    pub full_formula: String,
    pub null_formula: String,
    pub n: usize,
    pub n_words: usize,
    pub merged_levels: Vec<String>,
    /// Absent when the row could not be fit; `note` says why.
    pub test: Option<RowTest>,
    pub note: Option<String>,
}

impl DirectionalityRow {
    pub fn p_value(&self) -> Option<f64> {
        self.test.as_ref().map(|t| t.p_value)
    }

    fn significant(&self, alpha: f64) -> Option<bool> {
        self.p_value().map(|p| p < alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalityResult {
    pub rows: Vec<DirectionalityRow>,
    pub verdict: Verdict,
}

impl DirectionalityResult {
    pub fn row(&self, direction: Direction, subset: Subset) -> Option<&DirectionalityRow> {
        self.rows
            .iter()
            .find(|r| r.direction == direction && r.subset == subset)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalityReport {
    pub alpha: f64,
    pub n_pairs: usize,
    pub n_words: usize,
    pub rows: Vec<DirectionalityRow>,
    pub verdict: Verdict,
    /// The same analysis without pairs touching an opaque vowel.
    pub opaque_excluded: Option<DirectionalityResult>,
}

impl DirectionalityReport {
    pub fn row(&self, direction: Direction, subset: Subset) -> Option<&DirectionalityRow> {
        self.rows
            .iter()
            .find(|r| r.direction == direction && r.subset == subset)
    }
}

/// Replaces levels seen fewer than `min` times by [`OTHER_LEVEL`].
/// Returns the merged labels and the names of the levels merged.
pub(crate) fn merge_sparse(values: &[String], min: usize) -> (Vec<String>, Vec<String>) {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_default() += 1;
    }
    let sparse: BTreeSet<String> = counts
        .iter()
        .filter(|(_, &c)| c < min)
        .map(|(l, _)| l.to_string())
        .collect();
    let merged = values
        .iter()
        .map(|v| {
            if sparse.contains(v) {
                OTHER_LEVEL.to_string()
            } else {
                v.clone()
            }
        })
        .collect();
    (merged, sparse.into_iter().collect())
}

pub(crate) fn coefficient_rows(
    names: &[String],
    estimates: &[f64],
    std_errors: &[f64],
    df: usize,
    prefix: &str,
) -> Vec<CoefficientRow> {
    names
        .iter()
        .zip(estimates.iter().zip(std_errors))
        .filter(|(n, _)| n.starts_with(prefix))
        .map(|(n, (&b, &se))| {
            let t = b / se;
            CoefficientRow {
                name: n.clone(),
                estimate: b,
                std_error: se,
                t_value: t,
                df,
                p_value: t_two_sided(t, df as f64),
            }
        })
        .collect()
}

fn run_row(
    pairs: &[&VowelPairObservation],
    direction: Direction,
    subset: Subset,
    config: &DirectionalityConfig,
) -> DirectionalityRow {
    let (response, own, cross) = match direction {
        Direction::RightToLeft => ("F1V1", "V1", "V2"),
        Direction::LeftToRight => ("F1V2", "V2", "V1"),
    };
    let full = Formula::new(response, &[own, cross], Some("word"));
    let null = full.without(cross);
    let selected: Vec<&VowelPairObservation> = pairs
        .iter()
        .copied()
        .filter(|p| match (subset, direction) {
            (Subset::Whole, _) => true,
            (Subset::PlusAtr, Direction::RightToLeft) => atr_of(p.v2) == Atr::Plus,
            (Subset::PlusAtr, Direction::LeftToRight) => atr_of(p.v1) == Atr::Plus,
        })
        .collect();
    let words: BTreeSet<&str> = selected.iter().map(|p| p.word.as_str()).collect();
    let mut row = DirectionalityRow {
        direction,
        subset,
        full_formula: full.to_string(),
        null_formula: null.to_string(),
        n: selected.len(),
        n_words: words.len(),
        merged_levels: Vec::new(),
        test: None,
        note: None,
    };

    let v1: Vec<String> = selected.iter().map(|p| p.v1.symbol().to_string()).collect();
    let v2: Vec<String> = selected.iter().map(|p| p.v2.symbol().to_string()).collect();
    let (v1, merged1) = merge_sparse(&v1, config.min_level_count);
    let (v2, merged2) = merge_sparse(&v2, config.min_level_count);
    row.merged_levels = merged1
        .iter()
        .map(|l| format!("V1:{l}"))
        .chain(merged2.iter().map(|l| format!("V2:{l}")))
        .collect();
    if !row.merged_levels.is_empty() {
        warn!(
            "{:?}/{:?}: merged sparse levels into '{OTHER_LEVEL}': {}",
            direction,
            subset,
            row.merged_levels.join(", ")
        );
    }

    let cross_levels: BTreeSet<&String> = match direction {
        Direction::RightToLeft => v2.iter().collect(),
        Direction::LeftToRight => v1.iter().collect(),
    };
    if words.len() < 2 {
        row.note = Some("fewer than 2 distinct words".into());
        return row;
    }
    if cross_levels.len() < 2 {
        row.note = Some(format!("factor {cross} has fewer than 2 levels after merging"));
        return row;
    }

    let fit = || -> Result<RowTest, StatsError> {
        let table = Table::new()
            .with_numeric("F1V1", selected.iter().map(|p| p.f1v1).collect())?
            .with_numeric("F1V2", selected.iter().map(|p| p.f1v2).collect())?
            .with_factor("V1", v1.clone())?
            .with_factor("V2", v2.clone())?
            .with_factor("word", selected.iter().map(|p| p.word.clone()))?;
        let full_design = build_design(&table, &full, &config.reference_levels)?;
        let null_design = build_design(&table, &null, &config.reference_levels)?;
        let full_fit = lmm_fit_ml(&full_design)?;
        let null_fit = lmm_fit_ml(&null_design)?;
        let lrt = likelihood_ratio_test(&full_fit, &null_fit)?;
        let df_resid = full_fit.n.saturating_sub(full_fit.column_names.len());
        Ok(RowTest {
            df: lrt.df,
            chi2: lrt.chi2,
            p_value: lrt.p_value,
            aic_full: lrt.aic_full,
            aic_null: lrt.aic_null,
            coefficients: coefficient_rows(
                &full_fit.column_names,
                &full_fit.coefficients,
                &full_fit.std_errors,
                df_resid,
                &format!("{cross}["),
            ),
            full: FitSummary::new(&full, &full_fit),
            null: FitSummary::new(&null, &null_fit),
        })
    };
    match fit() {
        Ok(t) => row.test = Some(t),
        Err(e) => {
            warn!("{direction:?}/{subset:?} not fit: {e}");
            row.note = Some(e.to_string());
        }
    }
    row
}

/// A direction counts as significant when its whole-data row is, and its
/// +ATR-subset row is too whenever that row could be fit.
fn verdict(rows: &[DirectionalityRow], alpha: f64) -> Verdict {
    let significant = |d: Direction| {
        let get = |s: Subset| rows.iter().find(|r| r.direction == d && r.subset == s);
        let whole = get(Subset::Whole).and_then(|r| r.significant(alpha)).unwrap_or(false);
        let subset = get(Subset::PlusAtr).and_then(|r| r.significant(alpha)).unwrap_or(true);
        whole && subset
    };
    match (significant(Direction::RightToLeft), significant(Direction::LeftToRight)) {
        (true, false) => Verdict::Regressive,
        (false, true) => Verdict::Progressive,
        (true, true) => Verdict::Both,
        (false, false) => Verdict::None,
    }
}

fn four_rows(pairs: &[&VowelPairObservation], config: &DirectionalityConfig) -> DirectionalityResult {
    let mut rows = Vec::with_capacity(4);
    for direction in [Direction::RightToLeft, Direction::LeftToRight] {
        for subset in [Subset::Whole, Subset::PlusAtr] {
            rows.push(run_row(pairs, direction, subset, config));
        }
    }
    let verdict = verdict(&rows, config.alpha);
    DirectionalityResult { rows, verdict }
}

/// The four likelihood-ratio rows (whole / +ATR subset × right-to-left /
/// left-to-right), each comparing a random-intercept model with and
/// without the cross-position vowel factor.
pub fn directionality_analysis(
    pairs: &[VowelPairObservation],
    config: &DirectionalityConfig,
) -> Result<DirectionalityReport, HarmonyError> {
    let words: BTreeSet<&str> = pairs.iter().map(|p| p.word.as_str()).collect();
    if words.len() < 2 {
        return Err(HarmonyError::InsufficientData(format!(
            "directionality analysis needs at least 2 distinct words, found {}",
            words.len()
        )));
    }
    let all: Vec<&VowelPairObservation> = pairs.iter().collect();
    let main = four_rows(&all, config);
    for r in main.rows.iter().filter(|r| r.subset == Subset::Whole) {
        if let Some(note) = &r.note {
            return Err(HarmonyError::InsufficientData(format!(
                "whole-data {:?} model could not be fit: {note}",
                r.direction
            )));
        }
    }
    let opaque_excluded = config.opaque_rerun.then(|| {
        let clear: Vec<&VowelPairObservation> = pairs.iter().filter(|p| !p.opaque).collect();
        four_rows(&clear, config)
    });
    Ok(DirectionalityReport {
        alpha: config.alpha,
        n_pairs: pairs.len(),
        n_words: words.len(),
        rows: main.rows,
        verdict: main.verdict,
        opaque_excluded,
    })
}
