use std::f64::consts::PI;

use super::SynthError;

/// Two-pole digital resonator with unity gain at DC:
/// `y[n] = A·x[n] + B·y[n-1] + C·y[n-2]`.
#[derive(Debug, Clone, Default)]
pub struct Resonator {
    a: f64,
    b: f64,
    c: f64,
    y1: f64,
    y2: f64,
}

fn check(frequency: f64, bandwidth: f64, rate: f64) -> Result<(), SynthError> {
    if !(frequency > 0.0 && frequency < rate / 2.0) {
        return Err(SynthError::InvalidSpec(format!(
            "resonator frequency {frequency} Hz outside (0, {}) Hz",
            rate / 2.0
        )));
    }
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(SynthError::InvalidSpec(format!(
            "resonator bandwidth {bandwidth} Hz must be positive"
        )));
    }
    Ok(())
}

impl Resonator {
    pub fn new(frequency: f64, bandwidth: f64, rate: f64) -> Result<Self, SynthError> {
        let mut r = Self::default();
        r.set(frequency, bandwidth, rate)?;
        Ok(r)
    }

    /// Retunes without clearing the filter state.
    pub fn set(&mut self, frequency: f64, bandwidth: f64, rate: f64) -> Result<(), SynthError> {
        check(frequency, bandwidth, rate)?;
        self.c = -(-2.0 * PI * bandwidth / rate).exp();
        self.b = 2.0 * (-PI * bandwidth / rate).exp() * (2.0 * PI * frequency / rate).cos();
        self.a = 1.0 - self.b - self.c;
        Ok(())
    }

    pub fn process(&mut self, x: f64) -> f64 {
        let y = self.a * x + self.b * self.y1 + self.c * self.y2;
        self.y2 = self.y1;
        self.y1 = y;
        y
    }
}

/// Filters `input` through a single fixed resonator.
pub fn resonator(
    input: &[f64],
    frequency: f64,
    bandwidth: f64,
    rate: f64,
) -> Result<Vec<f64>, SynthError> {
    let mut r = Resonator::new(frequency, bandwidth, rate)?;
    Ok(input.iter().map(|&x| r.process(x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// |DTFT| of `x` at `freq` Hz.
    fn dtft_magnitude(x: &[f64], freq: f64, rate: f64) -> f64 {
        let w = 2.0 * PI * freq / rate;
        let (mut re, mut im) = (0.0, 0.0);
        for (n, v) in x.iter().enumerate() {
            re += v * (w * n as f64).cos();
            im -= v * (w * n as f64).sin();
        }
        (re * re + im * im).sqrt()
    }

    fn impulse(n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        x[0] = 1.0;
        x
    }

    #[test]
    fn impulse_response_peaks_at_centre() {
        let rate = 11000.0;
        let n = 2048;
        let bin = rate / n as f64;
        let h = resonator(&impulse(n), 500.0, 80.0, rate).unwrap();
        let peak = (1..n / 2)
            .map(|k| (k, dtft_magnitude(&h, k as f64 * bin, rate)))
            .fold((0, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        let f = peak.0 as f64 * bin;
        assert!((f - 500.0).abs() <= bin, "peak at {f} Hz");
    }

    #[test]
    fn unity_dc_gain() {
        let y = resonator(&vec![1.0; 20000], 700.0, 90.0, 16000.0).unwrap();
        assert!((y.last().unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn half_power_bandwidth() {
        let rate = 11000.0;
        let h = resonator(&impulse(8192), 1500.0, 120.0, rate).unwrap();
        let grid: Vec<(f64, f64)> = (0..4000)
            .map(|k| {
                let f = 1300.0 + k as f64 * 0.1;
                (f, dtft_magnitude(&h, f, rate).powi(2))
            })
            .collect();
        let (peak_f, peak_p) = grid
            .iter()
            .copied()
            .fold((0.0, 0.0), |a, c| if c.1 > a.1 { c } else { a });
        let half = peak_p / 2.0;
        let lower = grid.iter().rev().find(|(f, p)| *f < peak_f && *p < half).unwrap().0;
        let upper = grid.iter().find(|(f, p)| *f > peak_f && *p < half).unwrap().0;
        let measured = upper - lower;
        assert!((measured - 120.0).abs() / 120.0 < 0.15, "bandwidth {measured}");
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Resonator::new(0.0, 50.0, 16000.0).is_err());
        assert!(Resonator::new(8000.0, 50.0, 16000.0).is_err());
        assert!(Resonator::new(500.0, 0.0, 16000.0).is_err());
    }
}
