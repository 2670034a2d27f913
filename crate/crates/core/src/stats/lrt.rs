use serde::{Deserialize, Serialize};

use super::special::chisq_sf;
use super::{LmmFit, OlsFit, StatsError};

/// Statistic values below this (in absolute terms) count as zero.
const CHI2_TOLERANCE: f64 = 1e-8;

/// What a likelihood-ratio test needs to know about a fitted model.
pub trait ModelFit {
    fn loglik(&self) -> f64;
    fn aic(&self) -> f64;
    fn fixed_effects(&self) -> &[String];
    fn n(&self) -> usize;
    fn response_fingerprint(&self) -> u64;
}

impl ModelFit for LmmFit {
    fn loglik(&self) -> f64 {
        self.loglik
    }
    fn aic(&self) -> f64 {
        self.aic
    }
    fn fixed_effects(&self) -> &[String] {
        &self.column_names
    }
    fn n(&self) -> usize {
        self.n
    }
    fn response_fingerprint(&self) -> u64 {
        self.response_fingerprint
    }
}

impl ModelFit for OlsFit {
    fn loglik(&self) -> f64 {
        self.loglik
    }
    fn aic(&self) -> f64 {
        self.aic
    }
    fn fixed_effects(&self) -> &[String] {
        &self.column_names
    }
    fn n(&self) -> usize {
        self.n
    }
    fn response_fingerprint(&self) -> u64 {
        self.response_fingerprint
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrtResult {
    pub chi2: f64,
    pub df: usize,
    pub p_value: f64,
    pub loglik_full: f64,
    pub loglik_null: f64,
    pub aic_full: f64,
    pub aic_null: f64,
}

/// Compares nested ML fits: χ² = 2(ℓ_full − ℓ_null), clamped at zero, on
/// as many degrees of freedom as the full model has extra fixed effects.
pub fn likelihood_ratio_test<M: ModelFit>(full: &M, null: &M) -> Result<LrtResult, StatsError> {
    if full.n() != null.n() || full.response_fingerprint() != null.response_fingerprint() {
        return Err(StatsError::NotNested(
            "models were fit to different responses".into(),
        ));
    }
    let full_cols = full.fixed_effects();
    if let Some(missing) = null.fixed_effects().iter().find(|c| !full_cols.contains(c)) {
        return Err(StatsError::NotNested(format!(
            "null-model column '{missing}' is absent from the full model"
        )));
    }
    let df = full_cols.len() - null.fixed_effects().len();
    let raw = 2.0 * (full.loglik() - null.loglik());
    let chi2 = if raw.abs() <= CHI2_TOLERANCE { 0.0 } else { raw.max(0.0) };
    let p_value = if df == 0 {
        if chi2 > 0.0 {
            return Err(StatsError::NotNested(format!(
                "identical fixed effects but log-likelihoods differ (chi2 = {chi2})"
            )));
        }
        1.0
    } else {
        chisq_sf(chi2, df as f64)
    };
    Ok(LrtResult {
        chi2,
        df,
        p_value,
        loglik_full: full.loglik(),
        loglik_null: null.loglik(),
        aic_full: full.aic(),
        aic_null: null.aic(),
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::stats::{build_design, lmm_fit_ml, ols_fit, Formula, Table};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn table(rng: &mut ChaCha8Rng, effect: f64) -> Table {
        let levels = ["e", "i", "u"];
        let mut y = Vec::new();
        let mut f = Vec::new();
        let mut g = Vec::new();
        for w in 0..12 {
            let b: f64 = rng.sample(StandardNormal);
            for r in 0..4 {
                let level = levels[(w + r) % 3];
                let shift = if level == "i" { effect } else { 0.0 };
                let e: f64 = rng.sample(StandardNormal);
                y.push(10.0 + b + shift + e);
                f.push(level);
                g.push(format!("w{w}"));
            }
        }
        Table::new()
            .with_numeric("y", y)
            .unwrap()
            .with_factor("V2", f)
            .unwrap()
            .with_factor("word", g)
            .unwrap()
    }

    fn lrt(t: &Table) -> LrtResult {
        let refs = BTreeMap::new();
        let full = build_design(t, &Formula::parse("y ~ V2 + (1|word)").unwrap(), &refs).unwrap();
        let null = build_design(t, &Formula::parse("y ~ 1 + (1|word)").unwrap(), &refs).unwrap();
        likelihood_ratio_test(&lmm_fit_ml(&full).unwrap(), &lmm_fit_ml(&null).unwrap()).unwrap()
    }

    #[test]
    fn model_against_itself() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = table(&mut rng, 0.0);
        let d = build_design(&t, &Formula::parse("y ~ V2 + (1|word)").unwrap(), &BTreeMap::new())
            .unwrap();
        let fit = lmm_fit_ml(&d).unwrap();
        let r = likelihood_ratio_test(&fit, &fit).unwrap();
        assert_eq!((r.chi2, r.df, r.p_value), (0.0, 0, 1.0));
    }

    #[test]
    fn detects_effect_and_counts_df() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = lrt(&table(&mut rng, 4.0));
        assert_eq!(r.df, 2);
        assert!(r.p_value < 1e-4);
        assert!((r.p_value - chisq_sf(r.chi2, 2.0)).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_nested() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let t = table(&mut rng, 0.0);
        let refs = BTreeMap::new();
        let a = ols_fit(&build_design(&t, &Formula::parse("y ~ V2").unwrap(), &refs).unwrap()).unwrap();
        let t2 = table(&mut rng, 0.0);
        let b = ols_fit(&build_design(&t2, &Formula::parse("y ~ 1").unwrap(), &refs).unwrap()).unwrap();
        assert!(matches!(likelihood_ratio_test(&a, &b), Err(StatsError::NotNested(_))));
        let c = ols_fit(&build_design(&t, &Formula::parse("y ~ 1").unwrap(), &refs).unwrap()).unwrap();
        assert!(matches!(likelihood_ratio_test(&c, &a), Err(StatsError::NotNested(_))));
        assert!(likelihood_ratio_test(&a, &c).is_ok());
    }

    #[test]
    fn scale_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = table(&mut rng, 1.0);
        let refs = BTreeMap::new();
        let full = build_design(&t, &Formula::parse("y ~ V2 + (1|word)").unwrap(), &refs).unwrap();
        let null = build_design(&t, &Formula::parse("y ~ 1 + (1|word)").unwrap(), &refs).unwrap();
        let base = likelihood_ratio_test(&lmm_fit_ml(&full).unwrap(), &lmm_fit_ml(&null).unwrap())
            .unwrap();
        for c in [0.01, 3.7, 250.0] {
            let scaled = likelihood_ratio_test(
                &lmm_fit_ml(&full.scaled_response(c)).unwrap(),
                &lmm_fit_ml(&null.scaled_response(c)).unwrap(),
            )
            .unwrap();
            assert!((scaled.chi2 - base.chi2).abs() < 1e-6);
        }
    }

    /// Under no effect the LRT p-values should be close to uniform.
    #[test]
    fn null_p_values_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut p: Vec<f64> = (0..1000).map(|_| lrt(&table(&mut rng, 0.0)).p_value).collect();
        p.sort_by(f64::total_cmp);
        let n = p.len() as f64;
        let ks = p
            .iter()
            .enumerate()
            .map(|(i, v)| ((i as f64 + 1.0) / n - v).max(v - i as f64 / n))
            .fold(0.0, f64::max);
        assert!(ks < 0.08, "KS distance {ks}");
    }
}
