//! Waveform container, WAV I/O and signal conditioning.

mod filter;
mod resample;
mod wav;

pub use filter::{de_emphasis, pre_emphasis, pre_emphasis_coefficient};
pub use resample::resample;
pub use wav::{quantize, read_wav, read_wav_bytes, write_wav, write_wav_bytes};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("malformed WAV header: {0}")]
    MalformedHeader(String),
    #[error("unsupported WAV encoding: {0}")]
    UnsupportedEncoding(String),
    #[error("truncated data chunk: header declares {declared} bytes, {available} present")]
    TruncatedData { declared: usize, available: usize },
    #[error("sample {index} = {value} is outside [-1, 1]")]
    OutOfRange { index: usize, value: f64 },
    #[error("sample {index} is not finite")]
    NonFinite { index: usize },
    #[error("invalid sample rate {0}")]
    InvalidRate(u32),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Mono waveform with its sample rate in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl AudioBuffer {
    /// Builds a buffer, rejecting a zero rate and non-finite samples.
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self, AudioError> {
        if sample_rate == 0 {
            return Err(AudioError::InvalidRate(sample_rate));
        }
        if let Some(index) = samples.iter().position(|s| !s.is_finite()) {
            return Err(AudioError::NonFinite { index });
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Duration in seconds.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, s| m.max(s.abs()))
    }

    /// Multiplies every sample by `gain`.
    pub fn scaled(&self, gain: f64) -> Result<Self, AudioError> {
        Self::new(
            self.samples.iter().map(|s| s * gain).collect(),
            self.sample_rate,
        )
    }
}
