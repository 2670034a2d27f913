use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::ols::{least_squares, ml_loglik};
use super::{DesignMatrix, StatsError};

/// Random-intercept model `y ~ N(Xβ, σ²(I + θ·ZZᵀ))` fit by maximum
/// likelihood, with θ = σ_b²/σ².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmmFit {
    pub column_names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub sigma2: f64,
    pub sigma_b2: f64,
    pub theta: f64,
    pub loglik: f64,
    /// Fixed effects plus the two variance parameters.
    pub k: usize,
    pub aic: f64,
    pub n: usize,
    pub n_groups: usize,
    pub iterations: usize,
    /// Final θ bracket of the golden-section search.
    pub bracket: (f64, f64),
    pub response_fingerprint: u64,
}

const MAX_ITERATIONS: usize = 200;
const THETA_TOLERANCE: f64 = 1e-8;
/// Coarse θ grid: 0 plus 10^(k/10) for k in −60..=60.
const GRID_DECADES: i32 = 6;
const GRID_STEPS_PER_DECADE: i32 = 10;

struct Profile {
    loglik: f64,
    beta: DVector<f64>,
    rss: f64,
    xtx_inv: DMatrix<f64>,
}

/// Everything needed to evaluate the profiled likelihood quickly.
struct Problem<'a> {
    design: &'a DesignMatrix,
    groups: &'a [usize],
    sizes: Vec<usize>,
}

impl Problem<'_> {
    /// Profiled fit at a fixed θ: whitening each group with
    /// `I − c·11ᵀ`, c = (1 − 1/√(1 + θ·n_g))/n_g, turns GLS into OLS.
    fn profile(&self, theta: f64) -> Result<Profile, StatsError> {
        let d = self.design;
        let (n, p) = (d.n(), d.p());
        let g = self.sizes.len();
        let c: Vec<f64> = self
            .sizes
            .iter()
            .map(|&m| {
                let m = m as f64;
                if m == 0.0 {
                    return 0.0;
                }
                (1.0 - 1.0 / (1.0 + theta * m).sqrt()) / m
            })
            .collect();
        let mut y_sum = vec![0.0; g];
        let mut x_sum = DMatrix::<f64>::zeros(g, p);
        for i in 0..n {
            let gi = self.groups[i];
            y_sum[gi] += d.y[i];
            for j in 0..p {
                x_sum[(gi, j)] += d.x[(i, j)];
            }
        }
        let y = DVector::from_fn(n, |i, _| d.y[i] - c[self.groups[i]] * y_sum[self.groups[i]]);
        let x = DMatrix::from_fn(n, p, |i, j| {
            d.x[(i, j)] - c[self.groups[i]] * x_sum[(self.groups[i], j)]
        });
        let (beta, rss, xtx_inv) = least_squares(&x, &y)?;
        let log_det: f64 = self
            .sizes
            .iter()
            .map(|&m| (1.0 + theta * m as f64).ln())
            .sum();
        Ok(Profile {
            loglik: ml_loglik(rss, n) - 0.5 * log_det,
            beta,
            rss,
            xtx_inv,
        })
    }
}

fn problem(design: &DesignMatrix) -> Result<Problem<'_>, StatsError> {
    let groups = design
        .groups
        .as_deref()
        .ok_or_else(|| StatsError::Formula("mixed model needs a (1|group) term".into()))?;
    let mut sizes = vec![0usize; design.group_labels.len()];
    for &g in groups {
        sizes[g] += 1;
    }
    if sizes.iter().filter(|&&s| s > 0).count() < 2 {
        return Err(StatsError::InsufficientData(
            "a random intercept needs at least 2 groups".into(),
        ));
    }
    if design.n() <= design.p() {
        return Err(StatsError::InsufficientData(format!(
            "{} observations for {} fixed effects",
            design.n(),
            design.p()
        )));
    }
    Ok(Problem {
        design,
        groups,
        sizes,
    })
}

/// Profiled ML log-likelihood at a given θ ≥ 0.
pub fn profile_loglik(design: &DesignMatrix, theta: f64) -> Result<f64, StatsError> {
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(StatsError::Formula(format!("theta {theta} must be finite and non-negative")));
    }
    Ok(problem(design)?.profile(theta)?.loglik)
}

fn theta_grid() -> Vec<f64> {
    let mut grid = vec![0.0];
    for k in -GRID_DECADES * GRID_STEPS_PER_DECADE..=GRID_DECADES * GRID_STEPS_PER_DECADE {
        grid.push(10f64.powf(k as f64 / GRID_STEPS_PER_DECADE as f64));
    }
    grid
}

/// Fits the random-intercept model by maximum likelihood.
///
/// The profiled log-likelihood is scanned on a log-spaced θ grid (with
/// θ = 0 included), and the best grid point's neighbours bracket a
/// golden-section search run until the bracket is narrower than 1e-8.
pub fn lmm_fit_ml(design: &DesignMatrix) -> Result<LmmFit, StatsError> {
    let prob = problem(design)?;
    let grid = theta_grid();
    let mut values = Vec::with_capacity(grid.len());
    for &t in &grid {
        values.push(prob.profile(t)?.loglik);
    }
    let best = values
        .iter()
        .enumerate()
        .fold(0, |b, (i, v)| if *v > values[b] { i } else { b });

    let (mut lo, mut hi) = (
        grid[best.saturating_sub(1)],
        grid[(best + 1).min(grid.len() - 1)],
    );
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let mut fa = prob.profile(a)?.loglik;
    let mut fb = prob.profile(b)?.loglik;
    let mut iterations = 0;
    while hi - lo > THETA_TOLERANCE.max(4.0 * f64::EPSILON * hi) {
        if iterations == MAX_ITERATIONS {
            return Err(StatsError::NonConvergence {
                lower: lo,
                upper: hi,
                iterations,
            });
        }
        iterations += 1;
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = prob.profile(a)?.loglik;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = prob.profile(b)?.loglik;
        }
    }

    // the optimum may sit on the boundary or on the best grid point itself
    let mut theta = if fa >= fb { a } else { b };
    let mut fit = prob.profile(theta)?;
    for candidate in [grid[best], lo, hi] {
        let other = prob.profile(candidate)?;
        if other.loglik > fit.loglik {
            theta = candidate;
            fit = other;
        }
    }

    let n = design.n();
    let p = design.p();
    let sigma2 = fit.rss / n as f64;
    if !(sigma2 > 0.0) {
        return Err(StatsError::Singular);
    }
    let k = p + 2;
    Ok(LmmFit {
        column_names: design.column_names.clone(),
        coefficients: fit.beta.iter().copied().collect(),
        std_errors: (0..p).map(|j| (sigma2 * fit.xtx_inv[(j, j)]).sqrt()).collect(),
        sigma2,
        sigma_b2: theta * sigma2,
        theta,
        loglik: fit.loglik,
        k,
        aic: 2.0 * k as f64 - 2.0 * fit.loglik,
        n,
        n_groups: prob.sizes.iter().filter(|&&s| s > 0).count(),
        iterations,
        bracket: (lo, hi),
        response_fingerprint: design.response_fingerprint(),
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;
    use std::f64::consts::PI;

    use super::*;
    use crate::stats::{build_design, ols_fit, Formula, Table};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    /// Dense GLS log-likelihood: builds V = I + θZZᵀ and factors it.
    fn dense_loglik(d: &DesignMatrix, theta: f64) -> f64 {
        let n = d.n();
        let g = d.groups.as_ref().unwrap();
        let v = DMatrix::from_fn(n, n, |i, j| {
            f64::from(u8::from(i == j)) + if g[i] == g[j] { theta } else { 0.0 }
        });
        let chol = v.cholesky().unwrap();
        let vinv = chol.inverse();
        let xtv = d.x.transpose() * &vinv;
        let beta = (&xtv * &d.x).try_inverse().unwrap() * (&xtv * &d.y);
        let r = &d.y - &d.x * beta;
        let q = (r.transpose() * &vinv * &r)[(0, 0)];
        let log_det: f64 = chol.l().diagonal().iter().map(|x| 2.0 * x.ln()).sum();
        let nf = n as f64;
        -0.5 * (nf * (2.0 * PI * q / nf).ln() + nf + log_det)
    }

    fn simulate(
        rng: &mut ChaCha8Rng,
        groups: usize,
        per: usize,
        sigma_b: f64,
        beta: (f64, f64),
    ) -> DesignMatrix {
        let mut y = Vec::new();
        let mut x = Vec::new();
        let mut w = Vec::new();
        for g in 0..groups {
            let b: f64 = sigma_b * rng.sample::<f64, _>(StandardNormal);
            for _ in 0..per {
                let xi: f64 = rng.random_range(-1.0..1.0);
                let e: f64 = rng.sample(StandardNormal);
                y.push(beta.0 + beta.1 * xi + b + e);
                x.push(xi);
                w.push(format!("w{g:03}"));
            }
        }
        let t = Table::new()
            .with_numeric("y", y)
            .unwrap()
            .with_numeric("x", x)
            .unwrap()
            .with_factor("word", w)
            .unwrap();
        build_design(&t, &Formula::parse("y ~ x + (1|word)").unwrap(), &BTreeMap::new()).unwrap()
    }

    #[test]
    fn profile_matches_dense_gls() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = simulate(&mut rng, 5, 4, 1.5, (2.0, 1.0));
        for theta in [0.0, 0.1, 1.0, 7.5, 100.0] {
            assert!((profile_loglik(&d, theta).unwrap() - dense_loglik(&d, theta)).abs() < 1e-9);
        }
    }

    #[test]
    fn beats_dense_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let groups = rng.random_range(3..7);
            let per = rng.random_range(2..6);
            let sigma_b = rng.random_range(0.0..3.0);
            let d = simulate(&mut rng, groups, per, sigma_b, (1.0, -2.0));
            let fit = lmm_fit_ml(&d).unwrap();
            for i in 0..1000 {
                let theta = 100.0 * i as f64 / 999.0;
                assert!(fit.loglik >= dense_loglik(&d, theta) - 1e-6);
            }
        }
    }

    #[test]
    fn zero_group_variance_reduces_to_ols() {
        // every group repeats the same rows, so group means of the residuals agree
        let y: Vec<f64> = (0..12).map(|i| [0.3, -0.2, 0.5, -0.6][i % 4]).collect();
        let x: Vec<f64> = (0..12).map(|i| (i % 4) as f64).collect();
        let w: Vec<String> = (0..12).map(|i| format!("g{}", i / 4)).collect();
        let t = Table::new()
            .with_numeric("y", y)
            .unwrap()
            .with_numeric("x", x)
            .unwrap()
            .with_factor("word", w)
            .unwrap();
        let mixed = build_design(&t, &Formula::parse("y ~ x + (1|word)").unwrap(), &BTreeMap::new()).unwrap();
        let plain = build_design(&t, &Formula::parse("y ~ x").unwrap(), &BTreeMap::new()).unwrap();
        let fit = lmm_fit_ml(&mixed).unwrap();
        let ols = ols_fit(&plain).unwrap();
        assert!(fit.sigma_b2 < 1e-6);
        assert!((fit.loglik - ols.loglik).abs() < 1e-6);
    }

    #[test]
    fn aic_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = simulate(&mut rng, 6, 5, 1.0, (0.0, 1.0));
        let fit = lmm_fit_ml(&d).unwrap();
        assert_eq!(fit.k, 4);
        assert_eq!(fit.aic, 2.0 * 4.0 - 2.0 * fit.loglik);
        assert!(fit.iterations <= 200);
        assert!(fit.bracket.1 - fit.bracket.0 <= 1e-8 || fit.bracket.1 - fit.bracket.0 <= 4.0 * f64::EPSILON * fit.bracket.1);
    }

    #[test]
    fn needs_two_groups() {
        let t = Table::new()
            .with_numeric("y", vec![1.0, 2.0, 3.0])
            .unwrap()
            .with_factor("word", ["a", "a", "a"])
            .unwrap();
        let d = build_design(&t, &Formula::parse("y ~ 1 + (1|word)").unwrap(), &BTreeMap::new()).unwrap();
        assert!(matches!(lmm_fit_ml(&d), Err(StatsError::InsufficientData(_))));
    }

    /// Balanced 20 × 10 design, σ² = 1, σ_b² = 4, β = (10, 2): every
    /// estimate should fall within three Monte-Carlo standard errors of
    /// the truth across 50 seeds.
    #[test]
    fn simulation_recovers_parameters() {
        let mut est: Vec<[f64; 4]> = Vec::new();
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let d = simulate(&mut rng, 20, 10, 2.0, (10.0, 2.0));
            let f = lmm_fit_ml(&d).unwrap();
            est.push([f.coefficients[0], f.coefficients[1], f.sigma2, f.sigma_b2]);
        }
        let truth = [10.0, 2.0, 1.0, 4.0];
        for (j, t) in truth.iter().enumerate() {
            let v: Vec<f64> = est.iter().map(|e| e[j]).collect();
            let m = v.iter().sum::<f64>() / v.len() as f64;
            let sd = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt();
            let mcse = sd / (v.len() as f64).sqrt();
            assert!((m - t).abs() < 3.0 * mcse, "parameter {j}: mean {m}, truth {t}, mcse {mcse}");
        }
    }
}
