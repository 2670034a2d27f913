use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::directionality::{merge_sparse, CoefficientRow};
use super::{HarmonyError, VowelPairObservation};
use crate::stats::{build_design, ols_fit, Formula, OlsFit, Table};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratedConfig {
    /// Significance level for calling a V2 coefficient a trigger.
    pub trigger_alpha: f64,
    pub min_level_count: usize,
    pub reference_levels: BTreeMap<String, String>,
}

impl Default for GeneratedConfig {
    fn default() -> Self {
        Self {
            trigger_alpha: 0.05,
            min_level_count: 2,
            reference_levels: BTreeMap::new(),
        }
    }
}

/// Summary of one OLS model shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsSummary {
    pub formula: String,
    pub fit: OlsFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedReport {
    pub n: usize,
    /// `F1V1 ~ V1 + F1V2`.
    pub numeric_shape: OlsSummary,
    /// `F1V1 ~ V1 + V2`.
    pub categorical_shape: OlsSummary,
    /// Every `V2[T.·]` coefficient of the categorical shape.
    pub triggers: Vec<CoefficientRow>,
    /// Level of the most negative significant V2 coefficient.
    pub dominant_trigger: Option<String>,
    pub merged_levels: Vec<String>,
}

/// OLS analysis of generated items, reported under both candidate model
/// shapes, with the V2 coefficient table used to name the dominant trigger.
pub fn analyze_generated(
    pairs: &[VowelPairObservation],
    config: &GeneratedConfig,
) -> Result<GeneratedReport, HarmonyError> {
    let v1: Vec<String> = pairs.iter().map(|p| p.v1.symbol().to_string()).collect();
    let v2: Vec<String> = pairs.iter().map(|p| p.v2.symbol().to_string()).collect();
    let (v1, m1) = merge_sparse(&v1, config.min_level_count);
    let (v2, m2) = merge_sparse(&v2, config.min_level_count);
    let table = Table::new()
        .with_numeric("F1V1", pairs.iter().map(|p| p.f1v1).collect())?
        .with_numeric("F1V2", pairs.iter().map(|p| p.f1v2).collect())?
        .with_factor("V1", v1)?
        .with_factor("V2", v2)?;

    let fit = |formula: Formula| -> Result<OlsSummary, HarmonyError> {
        let design = build_design(&table, &formula, &config.reference_levels)?;
        if design.n() < design.p() + 5 {
            return Err(HarmonyError::InsufficientData(format!(
                "{} observations for {} coefficients in '{formula}'; need at least p + 5",
                design.n(),
                design.p()
            )));
        }
        Ok(OlsSummary {
            formula: formula.to_string(),
            fit: ols_fit(&design)?,
        })
    };
    let numeric_shape = fit(Formula::new("F1V1", &["V1", "F1V2"], None))?;
    let categorical_shape = fit(Formula::new("F1V1", &["V1", "V2"], None))?;

    let f = &categorical_shape.fit;
    let triggers: Vec<CoefficientRow> = (0..f.column_names.len())
        .filter(|&j| f.column_names[j].starts_with("V2["))
        .map(|j| CoefficientRow {
            name: f.column_names[j].clone(),
            estimate: f.coefficients[j],
            std_error: f.std_errors[j],
            t_value: f.t_values[j],
            df: f.df_resid,
            p_value: f.p_values[j],
        })
        .collect();

    let dominant_trigger = triggers
        .iter()
        .filter(|r| r.estimate < 0.0 && r.p_value < config.trigger_alpha)
        .min_by(|a, b| a.estimate.total_cmp(&b.estimate))
        .map(|r| {
            r.name
                .trim_start_matches("V2[T.")
                .trim_end_matches(']')
                .to_string()
        });

    Ok(GeneratedReport {
        n: pairs.len(),
        numeric_shape,
        categorical_shape,
        triggers,
        dominant_trigger,
        merged_levels: m1
            .iter()
            .map(|l| format!("V1:{l}"))
            .chain(m2.iter().map(|l| format!("V2:{l}")))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmony::{Source, Vowel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn pairs(trigger: Option<Vowel>, noise_sd: f64) -> Vec<VowelPairObservation> {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let noise = Normal::new(0.0, noise_sd.max(1e-300)).unwrap();
        let mut out = Vec::new();
        for (k, &v1) in [Vowel::OpenE, Vowel::OpenO, Vowel::E, Vowel::O].iter().enumerate() {
            for (j, &v2) in Vowel::ALL.iter().enumerate() {
                for r in 0..3 {
                    let shift = if Some(v2) == trigger { 150.0 } else { 0.0 };
                    let e = if noise_sd > 0.0 { noise.sample(&mut rng) } else { 0.0 };
                    out.push(VowelPairObservation {
                        token_id: format!("g{k}{j}{r}"),
                        word: format!("{v1}{v2}"),
                        v1,
                        v2,
                        f1v1: 500.0 + 30.0 * k as f64 - shift + e,
                        f1v2: 400.0 + 10.0 * j as f64,
                        f2v1: 1500.0,
                        f2v2: 1500.0,
                        position: 1,
                        distance: 1,
                        opaque: false,
                        source: Source::Generated,
                    });
                }
            }
        }
        out
    }

    #[test]
    fn finds_i_trigger() {
        let r = analyze_generated(&pairs(Some(Vowel::I), 25.0), &GeneratedConfig::default()).unwrap();
        assert_eq!(r.dominant_trigger.as_deref(), Some("i"));
        let row = r.triggers.iter().find(|t| t.name == "V2[T.i]").unwrap();
        assert!(row.estimate < 0.0 && row.p_value < 0.05);
        assert_eq!(r.triggers.len(), 7);
        assert!(r.numeric_shape.formula.contains("F1V2"));
    }

    #[test]
    fn finds_u_trigger() {
        let r = analyze_generated(&pairs(Some(Vowel::U), 25.0), &GeneratedConfig::default()).unwrap();
        assert_eq!(r.dominant_trigger.as_deref(), Some("u"));
    }

    #[test]
    fn identical_values_have_no_trigger() {
        let mut p = pairs(None, 0.0);
        for x in &mut p {
            x.f1v1 = 480.0;
        }
        let r = analyze_generated(&p, &GeneratedConfig::default()).unwrap();
        assert!(r.triggers.iter().all(|t| t.p_value >= 0.05));
        assert_eq!(r.dominant_trigger, None);
    }

    #[test]
    fn too_few_observations() {
        let p: Vec<_> = pairs(Some(Vowel::I), 25.0).into_iter().step_by(9).take(10).collect();
        assert!(matches!(
            analyze_generated(&p, &GeneratedConfig::default()),
            Err(HarmonyError::InsufficientData(_))
        ));
    }
}
