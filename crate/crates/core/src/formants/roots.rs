//! Roots of real polynomials.
//!
//! Primary route: eigenvalues of the companion matrix (real Schur form by
//! shifted QR), followed by Newton polishing. If any polished root still
//! fails the residual test, Aberth–Ehrlich simultaneous iteration is run
//! from the eigenvalue estimates.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::FormantError;

const RESIDUAL_TOLERANCE: f64 = 1e-6;
const ABERTH_MAX_ITER: usize = 500;

/// Horner evaluation of `p` (descending powers) and its derivative.
fn eval(coefs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coefs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `Σ |c_k|·|z|^(n-k)`, the magnitude scale against which residuals are judged.
fn scale(coefs: &[f64], z: Complex64) -> f64 {
    let r = z.norm();
    coefs.iter().fold(0.0, |acc, c| acc * r + c.abs())
}

fn relative_residual(coefs: &[f64], z: Complex64) -> f64 {
    let s = scale(coefs, z);
    if s == 0.0 {
        0.0
    } else {
        eval(coefs, z).0.norm() / s
    }
}

fn newton_polish(coefs: &[f64], mut z: Complex64, real: bool) -> Complex64 {
    for _ in 0..8 {
        let (p, dp) = eval(coefs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let mut candidate = z - p / dp;
        if real {
            candidate.im = 0.0;
        }
        if !candidate.re.is_finite() || !candidate.im.is_finite() {
            break;
        }
        if eval(coefs, candidate).0.norm() >= p.norm() {
            break;
        }
        z = candidate;
    }
    z
}

fn companion_eigenvalues(monic: &[f64]) -> Option<Vec<Complex64>> {
    let n = monic.len() - 1;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -monic[j + 1];
    }
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000)?;
    Some(
        schur
            .complex_eigenvalues()
            .iter()
            .map(|c| Complex64::new(c.re, c.im))
            .collect(),
    )
}

fn aberth(coefs: &[f64], start: &[Complex64]) -> Vec<Complex64> {
    let n = start.len();
    let mut z = start.to_vec();
    // nudge coincident starting points apart
    for i in 0..n {
        for j in 0..i {
            if (z[i] - z[j]).norm() < 1e-10 {
                z[i] += Complex64::new(1e-6 * (i as f64 + 1.0), 1e-6);
            }
        }
    }
    for _ in 0..ABERTH_MAX_ITER {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = eval(coefs, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| Complex64::new(1.0, 0.0) / (z[k] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / z[k].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

/// Forces conjugate symmetry: roots within `tol` of the real axis become
/// real, each upper-half root is paired with the closest lower-half root and
/// both are replaced by an exact conjugate pair.
fn symmetrize(roots: &[Complex64]) -> Option<Vec<Complex64>> {
    let tol = |z: &Complex64| 1e-9 * z.norm().max(1.0);
    let mut real = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for z in roots {
        if z.im.abs() <= tol(z) {
            real.push(Complex64::new(z.re, 0.0));
        } else if z.im > 0.0 {
            upper.push(*z);
        } else {
            lower.push(*z);
        }
    }
    if upper.len() != lower.len() {
        return None;
    }
    let mut out = real;
    for u in upper {
        let (idx, _) = lower
            .iter()
            .enumerate()
            .map(|(i, l)| (i, (l.conj() - u).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        let l = lower.swap_remove(idx);
        let mean = (u + l.conj()) * 0.5;
        out.push(mean);
        out.push(mean.conj());
    }
    Some(out)
}

/// All complex roots of `coefficients[0]·z^n + … + coefficients[n]`.
///
/// Conjugate pairs are returned as exact conjugates. Fails if the leading
/// coefficient is zero, the degree is zero, or neither route meets the
/// relative residual bound of 1e-6.
pub fn polynomial_roots(coefficients: &[f64]) -> Result<Vec<Complex64>, FormantError> {
    if coefficients.len() < 2 {
        return Err(FormantError::InvalidPolynomial(
            "degree must be at least one".into(),
        ));
    }
    let lead = coefficients[0];
    if lead == 0.0 || !lead.is_finite() {
        return Err(FormantError::InvalidPolynomial(
            "leading coefficient must be finite and nonzero".into(),
        ));
    }
    if coefficients.iter().any(|c| !c.is_finite()) {
        return Err(FormantError::InvalidPolynomial(
            "coefficients must be finite".into(),
        ));
    }
    let monic: Vec<f64> = coefficients.iter().map(|c| c / lead).collect();
    let n = monic.len() - 1;

    let worst = |roots: &[Complex64]| {
        roots
            .iter()
            .map(|z| relative_residual(&monic, *z))
            .fold(0.0_f64, f64::max)
    };

    let estimates = companion_eigenvalues(&monic);
    if let Some(eig) = &estimates {
        let polished: Vec<Complex64> = eig
            .iter()
            .map(|z| newton_polish(&monic, *z, z.im == 0.0))
            .collect();
        if let Some(sym) = symmetrize(&polished) {
            if sym.len() == n && worst(&sym) < RESIDUAL_TOLERANCE {
                return Ok(sym);
            }
        }
    }

    let start: Vec<Complex64> = match &estimates {
        Some(e) => e.clone(),
        None => {
            // Cauchy-style radius with irrational angular offset
            let radius = 1.0 + monic[1..].iter().fold(0.0_f64, |m, c| m.max(c.abs()));
            (0..n)
                .map(|k| {
                    Complex64::from_polar(
                        0.5 * radius,
                        2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4,
                    )
                })
                .collect()
        }
    };
    let refined = aberth(&monic, &start);
    let sym = symmetrize(&refined).unwrap_or(refined);
    let residual = worst(&sym);
    if residual < RESIDUAL_TOLERANCE {
        Ok(sym)
    } else {
        Err(FormantError::RootNonConvergence { residual })
    }
}
