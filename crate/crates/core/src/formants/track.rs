use crate::audio::{pre_emphasis, resample, AudioBuffer};

use super::{
    burg, polynomial_roots, roots_to_formants, FormantConfig, FormantError, FormantFrame,
    FormantTrack, VowelSegment, POINTS_PER_TRACK,
};

/// A recording prepared once for repeated segment measurement: resampled
/// to twice the formant ceiling and pre-emphasized.
#[derive(Debug, Clone)]
pub struct FormantAnalyzer {
    config: FormantConfig,
    samples: Vec<f64>,
    rate: f64,
    duration: f64,
    window: Vec<f64>,
}

/// Gaussian window reaching exp(-12) one sample beyond each end, shifted
/// and rescaled so that level maps to zero.
fn gaussian_window(n: usize) -> Vec<f64> {
    let edge = (-12.0f64).exp();
    let mid = (n as f64 - 1.0) / 2.0;
    let denom = (n as f64 + 1.0).powi(2);
    (0..n)
        .map(|i| {
            let d = i as f64 - mid;
            ((-48.0 * d * d / denom).exp() - edge) / (1.0 - edge)
        })
        .collect()
}

impl FormantAnalyzer {
    pub fn new(buffer: &AudioBuffer, config: &FormantConfig) -> Result<Self, FormantError> {
        config.validate()?;
        let resampled = resample(buffer, config.analysis_rate())?;
        let emphasized = pre_emphasis(&resampled, config.pre_emphasis_hz)?;
        let rate = emphasized.sample_rate() as f64;
        let n = (config.physical_window() * rate).round() as usize;
        Ok(Self {
            config: config.clone(),
            duration: buffer.duration(),
            samples: emphasized.into_samples(),
            rate,
            window: gaussian_window(n),
        })
    }

    pub fn config(&self) -> &FormantConfig {
        &self.config
    }

    fn frame_at(&self, time: f64) -> FormantFrame {
        let n = self.window.len();
        let first = (time * self.rate - (n as f64 - 1.0) / 2.0).round() as i64;
        let windowed: Vec<f64> = self
            .window
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let idx = first + i as i64;
                if idx >= 0 && (idx as usize) < self.samples.len() {
                    self.samples[idx as usize] * w
                } else {
                    0.0
                }
            })
            .collect();
        let formants = burg(&windowed, self.config.lpc_order())
            .ok()
            .and_then(|(a, _)| {
                let mut poly = Vec::with_capacity(a.len() + 1);
                poly.push(1.0);
                poly.extend(a.iter().map(|c| -c));
                polynomial_roots(&poly).ok()
            })
            .map(|roots| {
                let mut f = roots_to_formants(&roots, self.rate, self.config.max_bandwidth);
                f.truncate(self.config.num_formants);
                f
            })
            .unwrap_or_default();
        FormantFrame { time, formants }
    }

    /// Measures one vowel segment at ten equidistant instants.
    pub fn track(&self, segment: &VowelSegment) -> Result<FormantTrack, FormantError> {
        let tolerance = 1.0 / self.rate;
        if !(segment.start >= 0.0
            && segment.end <= self.duration + tolerance
            && segment.start < segment.end)
        {
            return Err(FormantError::SegmentOutOfRange {
                start: segment.start,
                end: segment.end,
                duration: self.duration,
            });
        }
        if segment.duration() < self.config.min_segment_duration {
            return Err(FormantError::SegmentTooShort {
                duration: segment.duration(),
                minimum: self.config.min_segment_duration,
            });
        }

        let frames: Vec<FormantFrame> = (0..POINTS_PER_TRACK)
            .map(|j| {
                let proportion = (j as f64 + 0.5) / POINTS_PER_TRACK as f64;
                self.frame_at(segment.start + proportion * segment.duration())
            })
            .collect();

        let required = self.config.min_valid_frames;
        let mean_of = |number: usize| {
            let values: Vec<f64> = frames.iter().filter_map(|f| f.frequency(number)).collect();
            (values.len() >= required).then(|| values.iter().sum::<f64>() / values.len() as f64)
        };
        let valid_frames = frames.iter().filter(|f| f.frequency(1).is_some()).count();
        let track = FormantTrack {
            segment: segment.clone(),
            mean_f1: mean_of(1),
            mean_f2: mean_of(2),
            mean_f3: mean_of(3),
            frames,
            valid_frames,
            min_valid_frames: required,
            reliable: valid_frames >= required,
        };
        if track.reliable {
            Ok(track)
        } else {
            Err(FormantError::UnreliableTrack {
                valid_frames,
                required,
                track: Box::new(track),
            })
        }
    }
}

/// One-shot convenience wrapper around [`FormantAnalyzer`].
pub fn track_formants(
    buffer: &AudioBuffer,
    segment: &VowelSegment,
    config: &FormantConfig,
) -> Result<FormantTrack, FormantError> {
    FormantAnalyzer::new(buffer, config)?.track(segment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmony::Vowel;

    fn segment(start: f64, end: f64) -> VowelSegment {
        VowelSegment {
            label: Vowel::A,
            start,
            end,
            token_id: "t".into(),
        }
    }

    #[test]
    fn window_shape() {
        let w = gaussian_window(275);
        assert!(w[0] > 0.0 && w[0] < 1e-4 && (w[0] - w[274]).abs() < 1e-15);
        assert!((w[137] - 1.0).abs() < 1e-3);
        assert!(w.iter().all(|v| (-1e-12..=1.0 + 1e-12).contains(v)));
    }

    #[test]
    fn silence_is_unreliable() {
        let buf = AudioBuffer::new(vec![0.0; 16000], 16000).unwrap();
        let err = track_formants(&buf, &segment(0.2, 0.4), &FormantConfig::default()).unwrap_err();
        match err {
            FormantError::UnreliableTrack {
                valid_frames,
                required,
                track,
            } => {
                assert_eq!(valid_frames, 0);
                assert_eq!(required, 6);
                assert!(!track.reliable);
                assert_eq!(track.frames.len(), 10);
                assert_eq!(track.mean_f1, None);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn range_and_length_checks() {
        let buf = AudioBuffer::new(vec![0.0; 8000], 16000).unwrap();
        let cfg = FormantConfig::default();
        assert!(matches!(
            track_formants(&buf, &segment(0.4, 0.6), &cfg),
            Err(FormantError::SegmentOutOfRange { .. })
        ));
        assert!(matches!(
            track_formants(&buf, &segment(0.1, 0.12), &cfg),
            Err(FormantError::SegmentTooShort { .. })
        ));
    }

    #[test]
    fn instants_are_strictly_inside() {
        let buf = AudioBuffer::new(
            (0..16000).map(|i| ((i * 7919) % 101) as f64 / 200.0 - 0.25).collect(),
            16000,
        )
        .unwrap();
        let track = track_formants(&buf, &segment(0.1, 0.3), &FormantConfig::default());
        let frames = match track {
            Ok(t) => t.frames,
            Err(FormantError::UnreliableTrack { track, .. }) => track.frames,
            Err(e) => panic!("{e}"),
        };
        let times: Vec<f64> = frames.iter().map(|f| f.time).collect();
        assert!((times[0] - 0.11).abs() < 1e-12);
        assert!((times[9] - 0.29).abs() < 1e-12);
        assert!(times.windows(2).all(|w| ((w[1] - w[0]) - 0.02).abs() < 1e-12));
    }
}
