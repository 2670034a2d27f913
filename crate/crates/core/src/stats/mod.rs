//! Regression machinery: treatment-coded designs, OLS, random-intercept
//! mixed models fit by maximum likelihood, likelihood-ratio tests and the
//! special functions behind their p-values.
//!
//! Fits report p-values at full precision; significance thresholds are
//! applied by callers.

mod design;
pub(crate) mod float_serde;
mod lmm;
mod lrt;
mod ols;
pub mod special;

pub use design::{build_design, Column, DesignMatrix, FactorInfo, Formula, Table};
pub use lmm::{lmm_fit_ml, profile_loglik, LmmFit};
pub use lrt::{likelihood_ratio_test, LrtResult, ModelFit};
pub use ols::{ols_fit, OlsFit};
pub use special::{chisq_sf, f_sf, t_sf, t_two_sided};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StatsError {
    #[error("column '{0}' not found")]
    MissingColumn(String),
    #[error("column '{column}' has {found} rows, expected {expected}")]
    LengthMismatch {
        column: String,
        expected: usize,
        found: usize,
    },
    #[error("column '{column}' row {row} is not finite")]
    NonFinite { column: String, row: usize },
    #[error("reference level '{level}' of factor '{factor}' does not occur in the data")]
    UnseenReference { factor: String, level: String },
    #[error("design is rank deficient: column '{column}' is aliased with earlier columns")]
    RankDeficient { column: String },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("formula: {0}")]
    Formula(String),
    #[error("singular least-squares system")]
    Singular,
    #[error("theta search did not converge after {iterations} iterations (bracket [{lower}, {upper}])")]
    NonConvergence {
        lower: f64,
        upper: f64,
        iterations: usize,
    },
    #[error("models are not nested: {0}")]
    NotNested(String),
}
