//! LPC formant measurement.
//!
//! A vowel segment is measured at ten instants (5%, 15%, …, 95% of its
//! duration). At each instant a Gaussian-windowed frame is fit with Burg's
//! method, the roots of the prediction polynomial are converted to
//! frequency/bandwidth pairs, and the lowest surviving candidates become F1,
//! F2, F3, … The track reports the mean of each formant over the frames in
//! which it was found.

mod burg;
mod roots;
mod track;

pub use burg::{burg, burg_with_powers};
pub use roots::polynomial_roots;
pub use track::{track_formants, FormantAnalyzer};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audio::AudioError;
use crate::harmony::Vowel;

/// Number of measurement instants per vowel.
pub const POINTS_PER_TRACK: usize = 10;

#[derive(Debug, Error, PartialEq)]
pub enum FormantError {
    #[error("frame has no energy after mean removal")]
    AllZeroFrame,
    #[error("LPC order {order} must be below the frame length {len}")]
    OrderTooLarge { order: usize, len: usize },
    #[error("LPC order {0} is invalid")]
    InvalidOrder(usize),
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("root finding did not converge (worst relative residual {residual:.3e})")]
    RootNonConvergence { residual: f64 },
    #[error("segment [{start}, {end}] s lies outside the {duration} s recording")]
    SegmentOutOfRange { start: f64, end: f64, duration: f64 },
    #[error("segment of {duration} s is shorter than the {minimum} s minimum")]
    SegmentTooShort { duration: f64, minimum: f64 },
    #[error("unreliable track: F1 found in {valid_frames} of {POINTS_PER_TRACK} frames, {required} required")]
    UnreliableTrack {
        valid_frames: usize,
        required: usize,
        track: Box<FormantTrack>,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("audio: {0}")]
    Audio(String),
}

impl From<AudioError> for FormantError {
    fn from(e: AudioError) -> Self {
        FormantError::Audio(e.to_string())
    }
}

/// A labelled vowel interval within one recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VowelSegment {
    pub label: Vowel,
    pub start: f64,
    pub end: f64,
    pub token_id: String,
}

impl VowelSegment {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Formant {
    pub frequency: f64,
    pub bandwidth: f64,
}

/// Formants found at one instant, ascending by frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormantFrame {
    pub time: f64,
    pub formants: Vec<Formant>,
}

impl FormantFrame {
    /// Frequency of formant `number` (1-based), if present.
    pub fn frequency(&self, number: usize) -> Option<f64> {
        number
            .checked_sub(1)
            .and_then(|i| self.formants.get(i))
            .map(|f| f.frequency)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormantTrack {
    pub segment: VowelSegment,
    pub frames: Vec<FormantFrame>,
    pub mean_f1: Option<f64>,
    pub mean_f2: Option<f64>,
    pub mean_f3: Option<f64>,
    /// Frames in which an F1 was found.
    pub valid_frames: usize,
    /// Threshold `valid_frames` had to reach.
    pub min_valid_frames: usize,
    pub reliable: bool,
}

impl FormantTrack {
    /// F1 at each of the ten instants.
    pub fn f1_points(&self) -> Vec<Option<f64>> {
        self.frames.iter().map(|f| f.frequency(1)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FormantConfig {
    /// Formant ceiling; the analysis rate is twice this.
    pub max_formant_hz: f64,
    pub num_formants: usize,
    /// Effective window length, seconds. As in Praat, the Gaussian itself
    /// spans twice this.
    pub window_length: f64,
    pub pre_emphasis_hz: f64,
    pub max_bandwidth: f64,
    pub min_valid_frames: usize,
    pub min_segment_duration: f64,
}

impl Default for FormantConfig {
    fn default() -> Self {
        Self {
            max_formant_hz: 5500.0,
            num_formants: 5,
            window_length: 0.025,
            pre_emphasis_hz: 50.0,
            max_bandwidth: 400.0,
            min_valid_frames: 6,
            min_segment_duration: 0.030,
        }
    }
}

impl FormantConfig {
    pub fn analysis_rate(&self) -> u32 {
        (2.0 * self.max_formant_hz).round() as u32
    }

    /// Support of the Gaussian window, seconds.
    pub fn physical_window(&self) -> f64 {
        2.0 * self.window_length
    }

    pub fn lpc_order(&self) -> usize {
        2 * self.num_formants
    }

    pub fn validate(&self) -> Result<(), FormantError> {
        let bad = |m: &str| Err(FormantError::Config(m.to_string()));
        if !(self.max_formant_hz > 100.0 && self.max_formant_hz.is_finite()) {
            return bad("max_formant_hz must exceed 100 Hz");
        }
        if self.num_formants == 0 || self.num_formants > 10 {
            return bad("num_formants must be between 1 and 10");
        }
        if !(self.window_length > 0.0 && self.window_length < 0.5) {
            return bad("window_length must be in (0, 0.5) s");
        }
        if !(self.pre_emphasis_hz > 0.0 && self.pre_emphasis_hz < self.max_formant_hz) {
            return bad("pre_emphasis_hz must be in (0, max_formant_hz)");
        }
        if !(self.max_bandwidth > 0.0) {
            return bad("max_bandwidth must be positive");
        }
        if self.min_valid_frames == 0 || self.min_valid_frames > POINTS_PER_TRACK {
            return bad("min_valid_frames must be between 1 and 10");
        }
        if !(self.min_segment_duration >= 0.0) {
            return bad("min_segment_duration must be non-negative");
        }
        let n = (self.physical_window() * self.analysis_rate() as f64).round() as usize;
        if n <= self.lpc_order() {
            return bad("window too short for the LPC order");
        }
        Ok(())
    }
}

/// Lowest candidate frequency kept, and the margin kept below Nyquist.
const EDGE_MARGIN_HZ: f64 = 50.0;
const MAX_FORMANTS: usize = 5;

/// Converts polynomial roots to formants.
///
/// Each root with positive imaginary part gives `F = arg(r)·rate/2π` and
/// `B = −ln|r|·rate/π`. Candidates are kept when
/// `50 < F < rate/2 − 50` and `0 < B < max_bandwidth`, sorted by frequency
/// and truncated to five.
pub fn roots_to_formants(roots: &[Complex64], analysis_rate: f64, max_bandwidth: f64) -> Vec<Formant> {
    let nyquist = analysis_rate / 2.0;
    let mut out: Vec<Formant> = roots
        .iter()
        .filter(|r| r.im > 0.0)
        .map(|r| Formant {
            frequency: r.arg() * analysis_rate / (2.0 * std::f64::consts::PI),
            bandwidth: -r.norm().ln() * analysis_rate / std::f64::consts::PI,
        })
        .filter(|f| {
            f.frequency > EDGE_MARGIN_HZ
                && f.frequency < nyquist - EDGE_MARGIN_HZ
                && f.bandwidth > 0.0
                && f.bandwidth < max_bandwidth
        })
        .collect();
    out.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
    out.truncate(MAX_FORMANTS);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn pole_at_500_hz() {
        let r = Complex64::from_polar(0.95, 2.0 * PI * 500.0 / 16000.0);
        let f = roots_to_formants(&[r, r.conj()], 16000.0, 400.0);
        assert_eq!(f.len(), 1);
        assert!((f[0].frequency - 500.0).abs() < 1e-9);
        assert!((f[0].bandwidth - 261.234_603_175_886_3).abs() < 1e-6);
    }

    #[test]
    fn quarter_turn_is_quarter_rate() {
        let r = Complex64::from_polar(0.99, PI / 2.0);
        let f = roots_to_formants(&[r], 16000.0, 400.0);
        assert!((f[0].frequency - 4000.0).abs() < 1e-9);
    }

    #[test]
    fn real_and_wide_roots_are_dropped() {
        let real = Complex64::new(0.9, 0.0);
        let wide = Complex64::from_polar(0.5, 1.0);
        let outside = Complex64::from_polar(1.01, 1.0);
        let near_dc = Complex64::from_polar(0.99, 2.0 * PI * 20.0 / 16000.0);
        assert!(roots_to_formants(&[real, wide, outside, near_dc], 16000.0, 400.0).is_empty());
    }

    #[test]
    fn sorted_and_truncated() {
        let roots: Vec<Complex64> = (1..=7)
            .rev()
            .map(|k| Complex64::from_polar(0.98, 2.0 * PI * (k as f64 * 600.0) / 11000.0))
            .collect();
        let f = roots_to_formants(&roots, 11000.0, 400.0);
        assert_eq!(f.len(), 5);
        assert!(f.windows(2).all(|w| w[0].frequency < w[1].frequency));
        assert!((f[0].frequency - 600.0).abs() < 1e-9);
    }

    #[test]
    fn default_config_is_valid() {
        let c = FormantConfig::default();
        c.validate().unwrap();
        assert_eq!(c.analysis_rate(), 11000);
        assert_eq!(c.lpc_order(), 10);
    }
}
