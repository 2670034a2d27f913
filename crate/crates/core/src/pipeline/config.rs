use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::formants::FormantConfig;
use crate::harmony::{DirectionalityConfig, GeneratedConfig, Vowel, DEFAULT_MARGIN_HZ};
use crate::synth::{CorpusParams, DEFAULT_TIER};

/// Every tunable of the four commands, read from one TOML file.
///
/// ```toml
/// [synth]
/// seed = 7
/// n_tokens = 200
/// rule = "regressive"
///
/// [formants]
/// window_length = 0.025
///
/// [extract]
/// tier = "phones"
///
/// [analysis]
/// alpha = 0.001
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub synth: CorpusParams,
    pub formants: FormantConfig,
    pub extract: ExtractConfig,
    pub analysis: AnalysisConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractConfig {
    /// Interval tier holding the vowel labels.
    pub tier: String,
    /// Labels skipped without a warning.
    pub consonants: Vec<String>,
    /// Extraction fails when more than this fraction of files fail.
    pub max_failure_fraction: f64,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self {
            tier: DEFAULT_TIER.to_string(),
            consonants: "p b t d k g m n N s z h r l j w c x f v"
                .split(' ')
                .map(String::from)
                .collect(),
            max_failure_fraction: 0.10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub alpha: f64,
    pub trigger_alpha: f64,
    pub margin_hz: f64,
    pub min_level_count: usize,
    /// Reference level per factor, e.g. `V1 = "E"`.
    pub reference_levels: BTreeMap<String, String>,
    pub opaque_rerun: bool,
    pub triggers: Vec<Vowel>,
    /// Largest vowel distance in the descriptive distance table.
    pub max_distance: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let d = DirectionalityConfig::default();
        Self {
            alpha: d.alpha,
            trigger_alpha: GeneratedConfig::default().trigger_alpha,
            margin_hz: DEFAULT_MARGIN_HZ,
            min_level_count: d.min_level_count,
            reference_levels: BTreeMap::new(),
            opaque_rerun: d.opaque_rerun,
            triggers: vec![Vowel::I, Vowel::U],
            max_distance: 3,
        }
    }
}

impl AnalysisConfig {
    pub fn directionality(&self) -> DirectionalityConfig {
        DirectionalityConfig {
            alpha: self.alpha,
            min_level_count: self.min_level_count,
            reference_levels: self.reference_levels.clone(),
            opaque_rerun: self.opaque_rerun,
        }
    }

    pub fn generated(&self) -> GeneratedConfig {
        GeneratedConfig {
            trigger_alpha: self.trigger_alpha,
            min_level_count: self.min_level_count,
            reference_levels: self.reference_levels.clone(),
        }
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let config: Config =
            toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks the sections used by `extract` and `analyze`; synthesis
    /// parameters are checked when a corpus is generated.
    pub fn validate(&self) -> Result<(), CliError> {
        self.formants
            .validate()
            .map_err(|e| CliError::Usage(format!("[formants] {e}")))?;
        let e = &self.extract;
        if e.tier.trim().is_empty() {
            return Err(CliError::Usage("[extract] tier must not be empty".into()));
        }
        if !(0.0..=1.0).contains(&e.max_failure_fraction) {
            return Err(CliError::Usage(
                "[extract] max_failure_fraction must be in [0, 1]".into(),
            ));
        }
        let a = &self.analysis;
        for (name, v) in [("alpha", a.alpha), ("trigger_alpha", a.trigger_alpha)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(CliError::Usage(format!("[analysis] {name} must be in (0, 1)")));
            }
        }
        if !(a.margin_hz >= 0.0 && a.margin_hz.is_finite()) {
            return Err(CliError::Usage("[analysis] margin_hz must be non-negative".into()));
        }
        if a.max_distance == 0 {
            return Err(CliError::Usage("[analysis] max_distance must be at least 1".into()));
        }
        if let Some(k) = a.reference_levels.keys().find(|k| *k != "V1" && *k != "V2") {
            return Err(CliError::Usage(format!(
                "[analysis] reference_levels: unknown factor '{k}' (expected V1 or V2)"
            )));
        }
        Ok(())
    }
}
