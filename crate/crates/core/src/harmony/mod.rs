//! Vowel features and the harmony analyses built on them: V1CV2 pair
//! assembly, F1-lowering scores, the four-row directionality test and the
//! trigger analysis for generated items.

mod directionality;
mod generated;
mod inventory;
mod pairs;
mod score;

pub use directionality::{
    directionality_analysis, CoefficientRow, Direction, DirectionalityConfig,
    DirectionalityReport, DirectionalityResult, DirectionalityRow, FitSummary, RowTest, Subset,
    Verdict, OTHER_LEVEL,
};
pub use generated::{analyze_generated, GeneratedConfig, GeneratedReport, OlsSummary};
pub use inventory::{atr_of, Atr, Backness, Height, Vowel, VowelFeatures, VowelInventory};
pub use pairs::{
    build_distance_pairs, build_pairs, Harmonicity, PairTable, Source, TokenRecord,
    VowelMeasurement, VowelPairObservation,
};
pub use score::{
    harmony_score, reference_means, score_summary, HarmonyScore, ScoreCell, ScoreSummary,
    DEFAULT_MARGIN_HZ,
};

use thiserror::Error;

use crate::stats::StatsError;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum HarmonyError {
    #[error("token/track mismatch: {0}")]
    TokenMismatch(String),
    #[error("no reference F1 mean for vowel '{0}'")]
    MissingReference(Vowel),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Stats(#[from] StatsError),
}
