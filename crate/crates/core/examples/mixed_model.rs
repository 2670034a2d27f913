//! Fits random-intercept models with and without a predictor and compares
//! them with a likelihood-ratio test.
//!
//! cargo run --example mixed_model

use std::collections::BTreeMap;

use harmonium::stats::{build_design, likelihood_ratio_test, lmm_fit_ml, Formula, Table};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut y, mut x, mut word) = (Vec::new(), Vec::new(), Vec::new());
    for g in 0..12 {
        let intercept = 2.0 * rng.sample::<f64, _>(StandardNormal);
        for _ in 0..5 {
            let level = ["lo", "mid", "hi"][rng.random_range(0..3)];
            let effect = match level {
                "hi" => 1.5,
                "mid" => 0.5,
                _ => 0.0,
            };
            y.push(10.0 + effect + intercept + rng.sample::<f64, _>(StandardNormal));
            x.push(level.to_string());
            word.push(format!("w{g}"));
        }
    }
    let table = Table::new()
        .with_numeric("y", y)?
        .with_factor("x", x)?
        .with_factor("word", word)?;

    let full_formula = Formula::parse("y ~ x + (1|word)")?;
    let null_formula = full_formula.without("x");
    let refs = BTreeMap::new();
    let full = lmm_fit_ml(&build_design(&table, &full_formula, &refs)?)?;
    let null = lmm_fit_ml(&build_design(&table, &null_formula, &refs)?)?;

    for (name, fit) in [(&full_formula, &full), (&null_formula, &null)] {
        println!(
            "{name}: loglik {:.3}, AIC {:.3}, sigma2 {:.3}, sigma_b2 {:.3}",
            fit.loglik, fit.aic, fit.sigma2, fit.sigma_b2
        );
    }
    for (n, (b, se)) in full.column_names.iter().zip(full.coefficients.iter().zip(&full.std_errors)) {
        println!("  {n:<10} {b:8.3} ({se:.3})");
    }
    let lrt = likelihood_ratio_test(&full, &null)?;
    println!("LRT: chi2 = {:.3}, df = {}, p = {:.3e}", lrt.chi2, lrt.df, lrt.p_value);
    Ok(())
}
