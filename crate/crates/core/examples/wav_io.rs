//! Writes a tone to PCM16 WAV, reads it back, resamples it and applies
//! pre-emphasis.
//!
//! cargo run --example wav_io

use std::f64::consts::PI;

use harmonium::audio::{pre_emphasis, read_wav_bytes, resample, write_wav_bytes};
use harmonium::AudioBuffer;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rate = 16000;
    let tone: Vec<f64> = (0..rate)
        .map(|n| 0.5 * (2.0 * PI * 440.0 * n as f64 / rate as f64).sin())
        .collect();
    let buffer = AudioBuffer::new(tone, rate)?;

    let bytes = write_wav_bytes(&buffer)?;
    let back = read_wav_bytes(&bytes)?;
    let worst = buffer
        .samples()
        .iter()
        .zip(back.samples())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("{} bytes, {} samples, max quantization error {worst:.2e}", bytes.len(), back.len());

    let down = resample(&back, 11000)?;
    println!("resampled to {} Hz: {} samples, peak {:.3}", down.sample_rate(), down.len(), down.peak());

    let emphasized = pre_emphasis(&down, 50.0)?;
    println!("after 50 Hz pre-emphasis: peak {:.3}", emphasized.peak());
    Ok(())
}
