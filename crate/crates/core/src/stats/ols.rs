use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::special::{f_sf, t_two_sided};
use super::{DesignMatrix, StatsError};

/// Ordinary least squares fit with the usual summary statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub column_names: Vec<String>,
    #[serde(with = "super::float_serde::vec")]
    pub coefficients: Vec<f64>,
    #[serde(with = "super::float_serde::vec")]
    pub std_errors: Vec<f64>,
    #[serde(with = "super::float_serde::vec")]
    pub t_values: Vec<f64>,
    #[serde(with = "super::float_serde::vec")]
    pub p_values: Vec<f64>,
    pub n: usize,
    pub df_resid: usize,
    #[serde(with = "super::float_serde")]
    pub rss: f64,
    #[serde(with = "super::float_serde")]
    pub r_squared: f64,
    #[serde(with = "super::float_serde")]
    pub adj_r_squared: f64,
    #[serde(with = "super::float_serde")]
    pub f_statistic: f64,
    pub f_df1: usize,
    pub f_df2: usize,
    #[serde(with = "super::float_serde")]
    pub f_p_value: f64,
    /// Gaussian log-likelihood at the ML variance RSS/n.
    #[serde(with = "super::float_serde")]
    pub loglik: f64,
    #[serde(with = "super::float_serde")]
    pub aic: f64,
    pub response_fingerprint: u64,
}

/// Least squares via QR: returns β, RSS and (XᵀX)⁻¹.
pub(crate) fn least_squares(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
) -> Result<(DVector<f64>, f64, DMatrix<f64>), StatsError> {
    let p = x.ncols();
    let qr = x.clone().qr();
    let r = qr.r();
    let scale = r.diagonal().amax();
    if r.diagonal().iter().any(|d| d.abs() <= 1e-12 * scale) || scale == 0.0 {
        return Err(StatsError::Singular);
    }
    let qty = qr.q().transpose() * y;
    let beta = r.solve_upper_triangular(&qty).ok_or(StatsError::Singular)?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or(StatsError::Singular)?;
    let xtx_inv = &r_inv * r_inv.transpose();
    let resid = y - x * &beta;
    Ok((beta, resid.norm_squared(), xtx_inv))
}

/// Gaussian log-likelihood at the ML variance `rss / n`.
pub(crate) fn ml_loglik(rss: f64, n: usize) -> f64 {
    let n = n as f64;
    -n / 2.0 * ((2.0 * PI * rss / n).ln() + 1.0)
}

/// Fits `y = Xβ + ε` by least squares.
///
/// When the residuals vanish (relative to the response scale) t-values are
/// reported as 0 for coefficients that are zero at that scale and ±∞
/// otherwise, so exact fits stay well defined.
pub fn ols_fit(design: &DesignMatrix) -> Result<OlsFit, StatsError> {
    let (n, p) = (design.n(), design.p());
    if n <= p {
        return Err(StatsError::InsufficientData(format!(
            "{n} observations for {p} coefficients; OLS needs n > p"
        )));
    }
    let y = &design.y;
    let (beta, rss, xtx_inv) = least_squares(&design.x, y)?;
    let df_resid = n - p;
    let y_scale = y.norm_squared().max(f64::MIN_POSITIVE);
    let exact = rss <= 1e-20 * y_scale;
    let rss = if exact { 0.0 } else { rss };
    let sigma2 = rss / df_resid as f64;

    let beta_scale = 1e-9 * (y_scale / n as f64).sqrt();
    let mut std_errors = Vec::with_capacity(p);
    let mut t_values = Vec::with_capacity(p);
    let mut p_values = Vec::with_capacity(p);
    for j in 0..p {
        let se = (sigma2 * xtx_inv[(j, j)]).sqrt();
        let t = if exact {
            if beta[j].abs() <= beta_scale {
                0.0
            } else {
                beta[j].signum() * f64::INFINITY
            }
        } else {
            beta[j] / se
        };
        std_errors.push(se);
        t_values.push(t);
        p_values.push(t_two_sided(t, df_resid as f64));
    }

    let mean = y.mean();
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let tss = if tss <= 1e-20 * y_scale { 0.0 } else { tss };
    let r_squared = if tss == 0.0 {
        0.0
    } else {
        (1.0 - rss / tss).clamp(0.0, 1.0)
    };
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n as f64 - 1.0) / df_resid as f64;
    let f_df1 = p - 1;
    let (f_statistic, f_p_value) = if f_df1 == 0 || tss == 0.0 {
        (0.0, 1.0)
    } else if exact {
        (f64::INFINITY, 0.0)
    } else {
        let f = ((tss - rss) / f_df1 as f64) / sigma2;
        let f = f.max(0.0);
        (f, f_sf(f, f_df1 as f64, df_resid as f64))
    };
    let loglik = ml_loglik(rss, n);
    // k counts the coefficients plus the residual variance
    let aic = 2.0 * (p as f64 + 1.0) - 2.0 * loglik;

    Ok(OlsFit {
        column_names: design.column_names.clone(),
        coefficients: beta.iter().copied().collect(),
        std_errors,
        t_values,
        p_values,
        n,
        df_resid,
        rss,
        r_squared,
        adj_r_squared,
        f_statistic,
        f_df1,
        f_df2: df_resid,
        f_p_value,
        loglik,
        aic,
        response_fingerprint: design.response_fingerprint(),
    })
}

impl OlsFit {
    pub fn coefficient(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::stats::{build_design, Formula, Table};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn design(y: Vec<f64>, cols: &[(&str, Vec<f64>)]) -> DesignMatrix {
        let mut t = Table::new().with_numeric("y", y).unwrap();
        let mut names = Vec::new();
        for (name, v) in cols {
            t = t.with_numeric(name, v.clone()).unwrap();
            names.push(*name);
        }
        build_design(&t, &Formula::new("y", &names, None), &BTreeMap::new()).unwrap()
    }

    #[test]
    fn exact_line() {
        let fit = ols_fit(&design(vec![1.0, 2.0, 3.0], &[("x", vec![1.0, 2.0, 3.0])])).unwrap();
        assert!(fit.coefficients[0].abs() < 1e-12);
        assert!((fit.coefficients[1] - 1.0).abs() < 1e-12);
        assert_eq!(fit.r_squared, 1.0);
        assert_eq!(fit.t_values[0], 0.0);
        assert_eq!(fit.t_values[1], f64::INFINITY);
    }

    #[test]
    fn constant_response() {
        let fit = ols_fit(&design(vec![5.0; 6], &[("x", vec![1.0, 2.0, 3.0, 1.0, 2.0, 3.0])])).unwrap();
        assert_eq!(fit.t_values[1], 0.0);
        assert_eq!(fit.p_values[1], 1.0);
        assert_eq!(fit.r_squared, 0.0);
        assert_eq!(fit.f_p_value, 1.0);
    }

    #[test]
    fn needs_more_rows_than_columns() {
        let d = design(vec![1.0, 3.0], &[("x", vec![1.0, 2.0])]);
        assert!(matches!(ols_fit(&d), Err(StatsError::InsufficientData(_))));
    }

    #[test]
    fn matches_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = 50;
            let cols: Vec<(&str, Vec<f64>)> = ["a", "b", "c"]
                .iter()
                .map(|&name| (name, (0..n).map(|_| rng.random_range(-3.0..3.0)).collect()))
                .collect();
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
            let d = design(y, &cols);
            let fit = ols_fit(&d).unwrap();
            let xtx = d.x.transpose() * &d.x;
            let oracle = xtx.try_inverse().unwrap() * d.x.transpose() * &d.y;
            for (b, o) in fit.coefficients.iter().zip(oracle.iter()) {
                assert!((b - o).abs() < 1e-8);
            }
            let resid = &d.y - &d.x * &oracle;
            let sigma2 = resid.norm_squared() / (n - 4) as f64;
            let se0 = (sigma2 * (d.x.transpose() * &d.x).try_inverse().unwrap()[(1, 1)]).sqrt();
            assert!((fit.std_errors[1] - se0).abs() < 1e-9);
            assert!(fit.adj_r_squared <= fit.r_squared);
            assert!((fit.aic - (2.0 * 5.0 - 2.0 * fit.loglik)).abs() < 1e-12);
        }
    }

    #[test]
    fn r_squared_never_drops_when_adding_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let n = 30;
            let y: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let mut cols = Vec::new();
            let mut last = 0.0;
            for name in ["a", "b", "c", "d", "e"] {
                cols.push((name, (0..n).map(|_| rng.random::<f64>()).collect::<Vec<_>>()));
                let r2 = ols_fit(&design(y.clone(), &cols)).unwrap().r_squared;
                assert!(r2 >= last - 1e-12);
                last = r2;
            }
        }
    }

    #[test]
    fn f_test_matches_single_t_test() {
        let d = design(
            vec![1.0, 2.5, 2.0, 4.5, 5.0, 5.5, 8.0],
            &[("x", vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0])],
        );
        let fit = ols_fit(&d).unwrap();
        assert!((fit.f_statistic - fit.t_values[1].powi(2)).abs() < 1e-9);
        assert!((fit.f_p_value - fit.p_values[1]).abs() < 1e-12);
        assert_eq!((fit.f_df1, fit.f_df2), (1, 5));
    }
}
