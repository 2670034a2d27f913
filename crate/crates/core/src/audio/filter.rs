use std::f64::consts::PI;

use super::{AudioBuffer, AudioError};

/// `exp(-2π·cutoff/rate)`, the first-difference coefficient for a given corner.
pub fn pre_emphasis_coefficient(cutoff: f64, sample_rate: u32) -> f64 {
    (-2.0 * PI * cutoff / sample_rate as f64).exp()
}

fn check_cutoff(cutoff: f64, sample_rate: u32) -> Result<(), AudioError> {
    if !(cutoff > 0.0 && cutoff < sample_rate as f64 / 2.0) {
        return Err(AudioError::InvalidParameter(format!(
            "pre-emphasis cutoff {cutoff} Hz must lie in (0, {}) Hz",
            sample_rate as f64 / 2.0
        )));
    }
    Ok(())
}

pub(crate) fn emphasize(x: &[f64], alpha: f64) -> Vec<f64> {
    let mut prev = 0.0;
    x.iter()
        .map(|&s| {
            let y = s - alpha * prev;
            prev = s;
            y
        })
        .collect()
}

pub(crate) fn deemphasize(y: &[f64], alpha: f64) -> Vec<f64> {
    let mut prev = 0.0;
    y.iter()
        .map(|&s| {
            prev = s + alpha * prev;
            prev
        })
        .collect()
}

/// `y[0] = x[0]`, `y[n] = x[n] - α·x[n-1]`.
pub fn pre_emphasis(buffer: &AudioBuffer, cutoff: f64) -> Result<AudioBuffer, AudioError> {
    check_cutoff(cutoff, buffer.sample_rate())?;
    let alpha = pre_emphasis_coefficient(cutoff, buffer.sample_rate());
    AudioBuffer::new(emphasize(buffer.samples(), alpha), buffer.sample_rate())
}

/// Exact inverse of [`pre_emphasis`] with the same cutoff.
pub fn de_emphasis(buffer: &AudioBuffer, cutoff: f64) -> Result<AudioBuffer, AudioError> {
    check_cutoff(cutoff, buffer.sample_rate())?;
    let alpha = pre_emphasis_coefficient(cutoff, buffer.sample_rate());
    AudioBuffer::new(deemphasize(buffer.samples(), alpha), buffer.sample_rate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unit_coefficient_is_first_difference() {
        assert_eq!(emphasize(&[1.0, 1.0, 1.0], 1.0), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn coefficient_for_50_hz() {
        let alpha = pre_emphasis_coefficient(50.0, 16000);
        assert!((alpha - (-2.0 * PI * 50.0 / 16000.0f64).exp()).abs() < 1e-15);
        assert!((alpha - 0.980_556_556_1).abs() < 1e-9);
    }

    #[test]
    fn inverse_filter_recovers_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..4000).map(|_| rng.random_range(-1.0..1.0)).collect();
        let buf = AudioBuffer::new(x.clone(), 16000).unwrap();
        let back = de_emphasis(&pre_emphasis(&buf, 50.0).unwrap(), 50.0).unwrap();
        let rms = (x
            .iter()
            .zip(back.samples())
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            / x.len() as f64)
            .sqrt();
        assert!(rms < 1e-9, "rms {rms}");
    }

    #[test]
    fn rejects_bad_cutoff() {
        let buf = AudioBuffer::new(vec![0.0; 4], 16000).unwrap();
        assert!(pre_emphasis(&buf, 0.0).is_err());
        assert!(pre_emphasis(&buf, 8000.0).is_err());
    }
}
