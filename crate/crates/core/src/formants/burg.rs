use super::FormantError;

/// Burg autoregressive fit of the given order.
///
/// Returns `(a, residual_power)` for the model `x[n] ≈ Σ a[k]·x[n-k]`,
/// `k = 1..=order`. The frame mean is removed first. Every reflection
/// coefficient has magnitude below one, so `1 − Σ a[k] z^{-k}` is minimum
/// phase.
pub fn burg(frame: &[f64], order: usize) -> Result<(Vec<f64>, f64), FormantError> {
    let (coefs, powers) = burg_with_powers(frame, order)?;
    Ok((coefs, *powers.last().unwrap_or(&0.0)))
}

/// Same as [`burg`] but also returns the prediction-error power after each
/// stage (`powers[m-1]` is the power of the order-`m` model).
pub fn burg_with_powers(
    frame: &[f64],
    order: usize,
) -> Result<(Vec<f64>, Vec<f64>), FormantError> {
    let n = frame.len();
    if order == 0 {
        return Err(FormantError::InvalidOrder(order));
    }
    if order >= n {
        return Err(FormantError::OrderTooLarge { order, len: n });
    }
    let mean = frame.iter().sum::<f64>() / n as f64;
    let x: Vec<f64> = frame.iter().map(|v| v - mean).collect();
    let energy: f64 = x.iter().map(|v| v * v).sum();
    let raw_energy: f64 = frame.iter().map(|v| v * v).sum();
    if energy <= 1e-24 * raw_energy || energy < f64::MIN_POSITIVE {
        return Err(FormantError::AllZeroFrame);
    }

    let mut power = energy / n as f64;
    let mut forward = x.clone();
    let mut backward = x;
    let mut a = vec![0.0; order];
    let mut previous = vec![0.0; order];
    let mut powers = Vec::with_capacity(order);

    for m in 0..order {
        // forward[i] and backward[i - 1] for i in m+1..n
        let mut num = 0.0;
        let mut den = 0.0;
        for i in (m + 1)..n {
            num += forward[i] * backward[i - 1];
            den += forward[i] * forward[i] + backward[i - 1] * backward[i - 1];
        }
        let k = if den > 0.0 { 2.0 * num / den } else { 0.0 };

        previous[..m].copy_from_slice(&a[..m]);
        a[m] = k;
        for j in 0..m {
            a[j] = previous[j] - k * previous[m - 1 - j];
        }
        power *= 1.0 - k * k;
        powers.push(power.max(0.0));

        // update in descending order so backward[i - 1] is still the old value
        for i in ((m + 1)..n).rev() {
            let f = forward[i];
            let b = backward[i - 1];
            forward[i] = f - k * b;
            backward[i] = b - k * f;
        }
    }
    Ok((a, powers))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formants::{polynomial_roots, roots_to_formants};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    /// Runs white noise through `1 / (1 - Σ c[k] z^-k)`.
    fn all_pole(coefs: &[f64], input: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = Vec::with_capacity(input.len());
        for (n, &x) in input.iter().enumerate() {
            let mut v = x;
            for (k, c) in coefs.iter().enumerate() {
                if n > k {
                    v += c * y[n - k - 1];
                }
            }
            y.push(v);
        }
        y
    }

    #[test]
    fn constant_frame_is_all_zero_after_mean_removal() {
        assert_eq!(burg(&[0.7; 32], 1), Err(FormantError::AllZeroFrame));
        assert_eq!(burg(&[0.0; 32], 2), Err(FormantError::AllZeroFrame));
    }

    #[test]
    fn order_must_fit_frame() {
        assert!(matches!(
            burg(&[1.0, 2.0, 3.0], 3),
            Err(FormantError::OrderTooLarge { .. })
        ));
        assert!(matches!(burg(&[1.0, 2.0], 0), Err(FormantError::InvalidOrder(0))));
    }

    #[test]
    fn recovers_first_order_coefficient() {
        let x = all_pole(&[0.9], &noise(11, 4096));
        let (a, _) = burg(&x, 1).unwrap();
        assert!((a[0] - 0.9).abs() < 0.02, "a1 = {}", a[0]);
    }

    #[test]
    fn recovers_resonance_frequency() {
        let rate = 16000.0;
        let r: f64 = 0.95;
        let theta = 2.0 * std::f64::consts::PI * 500.0 / rate;
        let coefs = [2.0 * r * theta.cos(), -r * r];
        let x = all_pole(&coefs, &noise(5, 8192));
        let (a, _) = burg(&x, 2).unwrap();
        let poly = [1.0, -a[0], -a[1]];
        let roots = polynomial_roots(&poly).unwrap();
        let formants = roots_to_formants(&roots, rate, 1000.0);
        assert_eq!(formants.len(), 1);
        assert!((formants[0].frequency - 500.0).abs() < 5.0, "{formants:?}");
    }

    #[test]
    fn residual_power_is_non_increasing() {
        let x = all_pole(&[1.2, -0.6, 0.1], &noise(9, 1000));
        let (_, powers) = burg_with_powers(&x, 16).unwrap();
        for w in powers.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12), "{powers:?}");
        }
        assert!(powers.iter().all(|p| *p >= 0.0));
        // each lower order fit agrees with the prefix of the staged powers
        for order in 1..=16 {
            let (_, p) = burg(&x, order).unwrap();
            assert_eq!(p, powers[order - 1]);
        }
    }

    #[test]
    fn model_is_minimum_phase() {
        let x = noise(21, 300);
        let (a, _) = burg(&x, 12).unwrap();
        let mut poly = vec![1.0];
        poly.extend(a.iter().map(|c| -c));
        for root in polynomial_roots(&poly).unwrap() {
            assert!(root.norm() < 1.0, "root {root} outside unit circle");
        }
    }
}
