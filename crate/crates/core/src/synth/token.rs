use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{FormantTarget, Resonator, SynthError};
use crate::audio::AudioBuffer;
use crate::harmony::Vowel;
use crate::textgrid::{Interval, IntervalTier, TextGrid};

/// Name of the single annotation tier written for synthesized tokens.
pub const DEFAULT_TIER: &str = "phones";

const PEAK: f64 = 0.3;
/// Consonant-proxy level relative to the vowel peak (−30 dB).
const BURST_DB: f64 = -30.0;
const RAMP_SECONDS: f64 = 0.020;
const TILT_CORNER_HZ: f64 = 100.0;
const MIN_VOWEL_SECONDS: f64 = 0.050;
const MIN_GAP_SECONDS: f64 = 0.020;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VowelSpec {
    pub label: Vowel,
    pub f0: f64,
    pub duration: f64,
    /// Formant targets at vowel onset, ascending.
    pub targets: Vec<FormantTarget>,
    /// Targets reached at offset by linear interpolation; steady when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_targets: Option<Vec<FormantTarget>>,
}

impl VowelSpec {
    pub fn steady(label: Vowel, f0: f64, duration: f64, targets: Vec<FormantTarget>) -> Self {
        Self {
            label,
            f0,
            duration,
            targets,
            end_targets: None,
        }
    }

    /// Time-averaged target frequency of formant `index` (0-based).
    pub fn mean_target(&self, index: usize) -> Option<f64> {
        let start = self.targets.get(index)?.frequency;
        let end = match &self.end_targets {
            Some(e) => e.get(index)?.frequency,
            None => start,
        };
        Some((start + end) / 2.0)
    }

    fn validate(&self, rate: f64) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidSpec(m));
        if !(self.f0 > 0.0 && self.f0 < 500.0) {
            return bad(format!("f0 {} Hz outside (0, 500)", self.f0));
        }
        if !(self.duration >= MIN_VOWEL_SECONDS && self.duration.is_finite()) {
            return bad(format!("vowel duration {} s below 50 ms", self.duration));
        }
        let check_targets = |t: &[FormantTarget]| {
            if !(3..=5).contains(&t.len()) {
                return Err(SynthError::InvalidSpec(format!(
                    "{} formant targets given, 3 to 5 required",
                    t.len()
                )));
            }
            if !t.windows(2).all(|w| w[0].frequency < w[1].frequency) {
                return Err(SynthError::InvalidSpec(
                    "formant targets must ascend in frequency".into(),
                ));
            }
            for f in t {
                if !(f.frequency > 0.0 && f.frequency < rate / 2.0 && f.bandwidth > 0.0) {
                    return Err(SynthError::InvalidSpec(format!(
                        "target {} Hz / {} Hz bandwidth out of range",
                        f.frequency, f.bandwidth
                    )));
                }
            }
            Ok(())
        };
        check_targets(&self.targets)?;
        if let Some(end) = &self.end_targets {
            check_targets(end)?;
            if end.len() != self.targets.len() {
                return bad("end targets must match onset targets in number".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenSpec {
    pub token_id: String,
    pub vowels: Vec<VowelSpec>,
    /// Length of the noise burst between adjacent vowels, seconds.
    pub gap: f64,
    pub sample_rate: u32,
    pub noise_seed: u64,
    /// Label written on gap intervals.
    pub consonant: String,
}

/// Where each vowel lands in the rendered token, in samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub start: usize,
    pub len: usize,
}

impl TokenSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.vowels.is_empty() {
            return Err(SynthError::InvalidSpec("token has no vowels".into()));
        }
        if self.sample_rate == 0 {
            return Err(SynthError::InvalidSpec("sample rate must be positive".into()));
        }
        if self.vowels.len() > 1 && !(self.gap >= MIN_GAP_SECONDS && self.gap.is_finite()) {
            return Err(SynthError::InvalidSpec(format!(
                "gap {} s below 20 ms",
                self.gap
            )));
        }
        let rate = self.sample_rate as f64;
        self.vowels.iter().try_for_each(|v| v.validate(rate))
    }

    /// Sample placement of every vowel plus the total length.
    pub fn layout(&self) -> (Vec<Placement>, usize) {
        let rate = self.sample_rate as f64;
        let gap = (self.gap * rate).round() as usize;
        let mut cursor = 0;
        let mut out = Vec::with_capacity(self.vowels.len());
        for (k, v) in self.vowels.iter().enumerate() {
            if k > 0 {
                cursor += gap;
            }
            let len = (v.duration * rate).round() as usize;
            out.push(Placement { start: cursor, len });
            cursor += len;
        }
        (out, cursor)
    }

    /// Lexical form: vowel symbols joined by the consonant label.
    pub fn word(&self) -> String {
        self.vowels
            .iter()
            .map(|v| v.label.symbol())
            .collect::<Vec<_>>()
            .join(&self.consonant)
    }
}

/// Ground truth for one rendered vowel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VowelTruth {
    pub label: Vowel,
    pub start: f64,
    pub end: f64,
    /// Time-averaged F1, F2, F3 targets.
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f0: f64,
    pub steady: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedToken {
    pub token_id: String,
    pub audio: AudioBuffer,
    pub grid: TextGrid,
    pub vowels: Vec<VowelTruth>,
}

fn render_vowel(spec: &VowelSpec, len: usize, rate: f64) -> Result<Vec<f64>, SynthError> {
    let tilt = (-2.0 * PI * TILT_CORNER_HZ / rate).exp();
    let mut resonators = spec
        .targets
        .iter()
        .map(|t| Resonator::new(t.frequency, t.bandwidth, rate))
        .collect::<Result<Vec<_>, _>>()?;
    let (mut lp1, mut lp2) = (0.0, 0.0);
    let period = rate / spec.f0;
    let mut phase = period;
    let ramp = ((RAMP_SECONDS * rate).round() as usize).min(len / 2);
    let mut out = Vec::with_capacity(len);
    for n in 0..len {
        if let Some(end) = &spec.end_targets {
            let frac = if len > 1 { n as f64 / (len - 1) as f64 } else { 0.0 };
            for ((r, a), b) in resonators.iter_mut().zip(&spec.targets).zip(end) {
                r.set(
                    a.frequency + frac * (b.frequency - a.frequency),
                    a.bandwidth + frac * (b.bandwidth - a.bandwidth),
                    rate,
                )?;
            }
        }
        let pulse = if phase >= period {
            phase -= period;
            1.0
        } else {
            0.0
        };
        phase += 1.0;
        lp1 = (1.0 - tilt) * pulse + tilt * lp1;
        lp2 = (1.0 - tilt) * lp1 + tilt * lp2;
        let mut y = lp2;
        for r in resonators.iter_mut() {
            y = r.process(y);
        }
        out.push(y);
    }
    // remove the DC the source carries before shaping the envelope
    let mean = out.iter().sum::<f64>() / len.max(1) as f64;
    for (n, y) in out.iter_mut().enumerate() {
        *y -= mean;
        let gain = if n < ramp {
            0.5 - 0.5 * (PI * n as f64 / ramp as f64).cos()
        } else if n >= len - ramp {
            0.5 - 0.5 * (PI * (len - 1 - n) as f64 / ramp as f64).cos()
        } else {
            1.0
        };
        *y *= gain;
    }
    let peak = out.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    if peak > 0.0 {
        for y in out.iter_mut() {
            *y *= PEAK / peak;
        }
    }
    Ok(out)
}

/// Renders a token to audio plus a one-tier TextGrid.
///
/// Each vowel is normalized to peak 0.3; gaps hold uniform white noise
/// 30 dB below that.
pub fn synthesize_token(spec: &TokenSpec) -> Result<RenderedToken, SynthError> {
    spec.validate()?;
    let rate = spec.sample_rate as f64;
    let (placements, total) = spec.layout();
    let mut samples = vec![0.0; total];
    let mut rng = ChaCha8Rng::seed_from_u64(spec.noise_seed);
    let burst = PEAK * 10f64.powf(BURST_DB / 20.0);

    let mut intervals = Vec::new();
    let mut vowels = Vec::with_capacity(spec.vowels.len());
    let seconds = |s: usize| s as f64 / rate;
    for (k, (v, p)) in spec.vowels.iter().zip(&placements).enumerate() {
        if k > 0 {
            let prev = placements[k - 1];
            let gap_start = prev.start + prev.len;
            for s in &mut samples[gap_start..p.start] {
                *s = rng.random_range(-burst..=burst);
            }
            intervals.push(Interval {
                xmin: seconds(gap_start),
                xmax: seconds(p.start),
                text: spec.consonant.clone(),
            });
        }
        let rendered = render_vowel(v, p.len, rate)?;
        samples[p.start..p.start + p.len].copy_from_slice(&rendered);
        let (start, end) = (seconds(p.start), seconds(p.start + p.len));
        intervals.push(Interval {
            xmin: start,
            xmax: end,
            text: v.label.symbol().to_string(),
        });
        let target = |i: usize| v.mean_target(i).unwrap_or(f64::NAN);
        vowels.push(VowelTruth {
            label: v.label,
            start,
            end,
            f1: target(0),
            f2: target(1),
            f3: target(2),
            f0: v.f0,
            steady: v.end_targets.is_none(),
        });
    }

    let xmax = seconds(total);
    let grid = TextGrid {
        xmin: 0.0,
        xmax,
        tiers: vec![IntervalTier {
            name: DEFAULT_TIER.to_string(),
            xmin: 0.0,
            xmax,
            intervals,
        }],
    };
    grid.validate()
        .map_err(|e| SynthError::TextGrid(e.to_string()))?;
    let audio =
        AudioBuffer::new(samples, spec.sample_rate).map_err(|e| SynthError::Audio(e.to_string()))?;
    Ok(RenderedToken {
        token_id: spec.token_id.clone(),
        audio,
        grid,
        vowels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::canonical_targets;

    fn vowel(label: Vowel, duration: f64) -> VowelSpec {
        VowelSpec::steady(label, 110.0, duration, canonical_targets(label).to_vec())
    }

    fn token(vowels: Vec<VowelSpec>) -> TokenSpec {
        TokenSpec {
            token_id: "t1".into(),
            vowels,
            gap: 0.04,
            sample_rate: 16000,
            noise_seed: 3,
            consonant: "t".into(),
        }
    }

    #[test]
    fn zero_vowels_rejected() {
        assert!(matches!(
            synthesize_token(&token(vec![])),
            Err(SynthError::InvalidSpec(_))
        ));
    }

    #[test]
    fn invalid_vowels_rejected() {
        let mut v = vowel(Vowel::E, 0.2);
        v.f0 = 600.0;
        assert!(synthesize_token(&token(vec![v])).is_err());
        assert!(synthesize_token(&token(vec![vowel(Vowel::E, 0.03)])).is_err());
        let mut v = vowel(Vowel::E, 0.2);
        v.targets.swap(0, 1);
        assert!(synthesize_token(&token(vec![v])).is_err());
        let mut t = token(vec![vowel(Vowel::E, 0.2), vowel(Vowel::U, 0.2)]);
        t.gap = 0.01;
        assert!(synthesize_token(&t).is_err());
    }

    #[test]
    fn duration_arithmetic() {
        let r = synthesize_token(&token(vec![vowel(Vowel::OpenE, 0.18), vowel(Vowel::U, 0.21)]))
            .unwrap();
        assert!((r.audio.duration() - (0.18 + 0.04 + 0.21)).abs() <= 0.001);
        assert!((r.grid.xmax - r.audio.duration()).abs() < 1e-12);
    }

    #[test]
    fn grid_marks_every_interval() {
        let r = synthesize_token(&token(vec![vowel(Vowel::OpenE, 0.2), vowel(Vowel::U, 0.2)]))
            .unwrap();
        let tier = r.grid.tier(DEFAULT_TIER).unwrap();
        let labels: Vec<&str> = tier.intervals.iter().map(|i| i.text.as_str()).collect();
        assert_eq!(labels, ["E", "t", "u"]);
        assert_eq!(tier.intervals[0].xmin, 0.0);
        assert!((tier.intervals[2].xmin - 0.24).abs() < 1e-12);
        assert_eq!(r.vowels[1].start, tier.intervals[2].xmin);
        assert_eq!(r.vowels[1].f1, 350.0);
    }

    #[test]
    fn peak_and_burst_levels() {
        let r = synthesize_token(&token(vec![vowel(Vowel::A, 0.2), vowel(Vowel::I, 0.2)]))
            .unwrap();
        assert!(r.audio.peak() <= PEAK + 1e-6);
        assert!((r.audio.peak() - PEAK).abs() < 1e-9);
        let gap = &r.audio.samples()[3200..3840];
        let burst_peak = gap.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        assert!(burst_peak > 0.0 && burst_peak <= PEAK * 10f64.powf(-1.5));
    }

    #[test]
    fn deterministic() {
        let t = token(vec![vowel(Vowel::O, 0.2), vowel(Vowel::E, 0.2)]);
        assert_eq!(synthesize_token(&t).unwrap(), synthesize_token(&t).unwrap());
    }

    #[test]
    fn word_form() {
        let t = token(vec![vowel(Vowel::OpenE, 0.2), vowel(Vowel::U, 0.2)]);
        assert_eq!(t.word(), "Etu");
    }
}
