//! Kaiser-windowed sinc resampling.

use std::f64::consts::PI;

use super::{AudioBuffer, AudioError};

const KAISER_BETA: f64 = 8.0;
/// Sinc zero crossings on each side of the kernel centre.
const ZERO_CROSSINGS: f64 = 16.0;
/// Passband edge as a fraction of the lower Nyquist frequency.
const ROLLOFF: f64 = 0.95;

/// Modified Bessel function of the first kind, order zero (power series).
fn bessel_i0(x: f64) -> f64 {
    let half_sq = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= half_sq / (k * k) as f64;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Resamples to `target_rate`. Output length is `round(n·target/source)`; the
/// anti-aliasing cutoff sits at 95% of the lower of the two Nyquist limits.
pub fn resample(buffer: &AudioBuffer, target_rate: u32) -> Result<AudioBuffer, AudioError> {
    if target_rate == 0 {
        return Err(AudioError::InvalidRate(target_rate));
    }
    let source_rate = buffer.sample_rate();
    if target_rate == source_rate {
        return Ok(buffer.clone());
    }
    let input = buffer.samples();
    let ratio = target_rate as f64 / source_rate as f64;
    let out_len = (input.len() as f64 * ratio).round() as usize;

    // normalized cutoff in cycles per input sample
    let cutoff = 0.5 * ratio.min(1.0) * ROLLOFF;
    let half_width = ZERO_CROSSINGS / (2.0 * cutoff);
    let norm = bessel_i0(KAISER_BETA);

    let mut out = Vec::with_capacity(out_len);
    for m in 0..out_len {
        let centre = m as f64 / ratio;
        let first = (centre - half_width).ceil().max(0.0) as usize;
        let last = ((centre + half_width).floor() as i64).min(input.len() as i64 - 1);
        let mut acc = 0.0;
        if last >= first as i64 {
            for (k, &x) in input.iter().enumerate().take(last as usize + 1).skip(first) {
                let d = k as f64 - centre;
                let u = d / half_width;
                let window = bessel_i0(KAISER_BETA * (1.0 - u * u).max(0.0).sqrt()) / norm;
                acc += x * 2.0 * cutoff * sinc(2.0 * cutoff * d) * window;
            }
        }
        out.push(acc);
    }
    AudioBuffer::new(out, target_rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(freq: f64, rate: u32, n: usize, amp: f64) -> AudioBuffer {
        AudioBuffer::new(
            (0..n)
                .map(|i| amp * (2.0 * PI * freq * i as f64 / rate as f64).sin())
                .collect(),
            rate,
        )
        .unwrap()
    }

    /// Naive single-bin DFT magnitude, scaled so a full-length sinusoid of
    /// amplitude A reads A.
    fn dft_amplitude(x: &[f64], bin: usize) -> f64 {
        let n = x.len() as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (i, &v) in x.iter().enumerate() {
            let phase = 2.0 * PI * bin as f64 * i as f64 / n;
            re += v * phase.cos();
            im -= v * phase.sin();
        }
        2.0 * (re * re + im * im).sqrt() / n
    }

    #[test]
    fn identity_rate_is_unchanged() {
        let buf = tone(440.0, 16000, 500, 0.4);
        assert_eq!(resample(&buf, 16000).unwrap(), buf);
    }

    #[test]
    fn bessel_reference_values() {
        assert!((bessel_i0(0.0) - 1.0).abs() < 1e-15);
        // I0(1) = 1.2660658777520082
        assert!((bessel_i0(1.0) - 1.266_065_877_752_008_2).abs() < 1e-14);
        // I0(8) = 427.56411572180474
        assert!((bessel_i0(8.0) - 427.564_115_721_804_74).abs() < 1e-9);
    }

    #[test]
    fn tone_survives_downsampling() {
        let buf = tone(100.0, 16000, 16000, 0.5);
        let out = resample(&buf, 11000).unwrap();
        assert!((out.len() as i64 - 11000).abs() <= 1);
        // one-second signal: bin k is k Hz
        let (best_bin, _) = (1..400)
            .map(|b| (b, dft_amplitude(out.samples(), b)))
            .fold((0, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        assert_eq!(best_bin, 100);
        // exclude the kernel's edge transients from the amplitude check
        let inner = &out.samples()[1100..9900];
        let amp = dft_amplitude(inner, 80);
        assert!((amp - 0.5).abs() / 0.5 < 0.01, "amplitude {amp}");
    }

    #[test]
    fn upsampling_preserves_duration_and_tone() {
        let buf = tone(250.0, 8000, 8000, 0.3);
        let out = resample(&buf, 16000).unwrap();
        assert_eq!(out.len(), 16000);
        let inner = &out.samples()[2000..14000];
        // 12000 samples at 16 kHz = 0.75 s, so 250 Hz sits in bin 187.5; use 0.5 s instead
        let amp = dft_amplitude(&inner[..8000], 125);
        assert!((amp - 0.3).abs() / 0.3 < 0.01, "amplitude {amp}");
    }

    #[test]
    fn removes_content_above_target_nyquist() {
        let buf = tone(7000.0, 16000, 16000, 0.5);
        let out = resample(&buf, 11000).unwrap();
        let inner = &out.samples()[1100..9900];
        let rms = (inner.iter().map(|v| v * v).sum::<f64>() / inner.len() as f64).sqrt();
        assert!(rms < 0.5 * 0.01, "alias rms {rms}");
    }

    #[test]
    fn zero_target_rate_is_rejected() {
        let buf = tone(100.0, 16000, 10, 0.1);
        assert!(resample(&buf, 0).is_err());
    }
}
