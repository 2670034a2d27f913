//! RIFF/WAVE PCM 16-bit mono reader and writer.
//!
//! Only `WAVE_FORMAT_PCM` (tag 1) or `WAVE_FORMAT_EXTENSIBLE` carrying the PCM
//! sub-format, 1 channel, 16 bits per sample is accepted. Unknown chunks are
//! skipped. All integers are little-endian.

use std::fs;
use std::path::Path;

use super::{AudioBuffer, AudioError};

const FORMAT_PCM: u16 = 1;
const FORMAT_IEEE_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

/// Maps a sample in [-1, 1] to int16 with round-half-away-from-zero.
/// `1.0` saturates to 32767 since int16 has no +32768.
pub fn quantize(sample: f64) -> i16 {
    let scaled = (sample * 32768.0).round();
    scaled.clamp(-32768.0, 32767.0) as i16
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer, AudioError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| AudioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_wav_bytes(&bytes)
}

struct Format {
    channels: u16,
    sample_rate: u32,
    bits: u16,
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

fn parse_fmt(body: &[u8]) -> Result<Format, AudioError> {
    if body.len() < 16 {
        return Err(AudioError::MalformedHeader(format!(
            "fmt chunk is {} bytes, need at least 16",
            body.len()
        )));
    }
    let mut tag = u16_at(body, 0);
    let channels = u16_at(body, 2);
    let sample_rate = u32_at(body, 4);
    let block_align = u16_at(body, 12);
    let bits = u16_at(body, 14);

    if tag == FORMAT_EXTENSIBLE {
        // cbSize(2) validBits(2) channelMask(4) subFormat GUID(16): first two bytes are the tag
        if body.len() < 40 {
            return Err(AudioError::MalformedHeader(
                "extensible fmt chunk shorter than 40 bytes".into(),
            ));
        }
        tag = u16_at(body, 24);
    }
    match tag {
        FORMAT_PCM => {}
        FORMAT_IEEE_FLOAT => {
            return Err(AudioError::UnsupportedEncoding(
                "IEEE float samples (only PCM 16-bit is accepted)".into(),
            ))
        }
        other => {
            return Err(AudioError::UnsupportedEncoding(format!(
                "format tag {other:#06x} (only PCM 16-bit is accepted)"
            )))
        }
    }
    if channels != 1 {
        return Err(AudioError::UnsupportedEncoding(format!(
            "{channels} channels (only mono is accepted)"
        )));
    }
    if bits != 16 {
        return Err(AudioError::UnsupportedEncoding(format!(
            "{bits} bits per sample (only 16 is accepted)"
        )));
    }
    if block_align != 2 {
        return Err(AudioError::MalformedHeader(format!(
            "block align {block_align} inconsistent with mono PCM16"
        )));
    }
    if sample_rate == 0 {
        return Err(AudioError::MalformedHeader("sample rate is zero".into()));
    }
    Ok(Format {
        channels,
        sample_rate,
        bits,
    })
}

/// Decodes an in-memory WAV file.
pub fn read_wav_bytes(bytes: &[u8]) -> Result<AudioBuffer, AudioError> {
    if bytes.len() < 12 {
        return Err(AudioError::MalformedHeader(
            "file shorter than the 12-byte RIFF header".into(),
        ));
    }
    if &bytes[0..4] != b"RIFF" {
        return Err(AudioError::MalformedHeader("missing RIFF tag".into()));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(AudioError::MalformedHeader("missing WAVE tag".into()));
    }

    let mut format: Option<Format> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body_start = pos + 8;
        if id == b"data" {
            let fmt = format.ok_or_else(|| {
                AudioError::MalformedHeader("data chunk before fmt chunk".into())
            })?;
            debug_assert!(fmt.channels == 1 && fmt.bits == 16);
            let available = bytes.len() - body_start;
            if size > available {
                return Err(AudioError::TruncatedData {
                    declared: size,
                    available,
                });
            }
            if size % 2 != 0 {
                return Err(AudioError::MalformedHeader(format!(
                    "data chunk of {size} bytes is not a whole number of samples"
                )));
            }
            let samples = bytes[body_start..body_start + size]
                .chunks_exact(2)
                .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64 / 32768.0)
                .collect();
            return AudioBuffer::new(samples, fmt.sample_rate);
        }
        let available = bytes.len() - body_start;
        if size > available {
            return Err(AudioError::MalformedHeader(format!(
                "chunk '{}' declares {size} bytes, {available} present",
                String::from_utf8_lossy(id)
            )));
        }
        if id == b"fmt " {
            format = Some(parse_fmt(&bytes[body_start..body_start + size])?);
        }
        // chunks are word aligned
        pos = body_start + size + (size & 1);
    }
    Err(AudioError::MalformedHeader(if format.is_some() {
        "no data chunk".into()
    } else {
        "no fmt chunk".into()
    }))
}

/// Encodes a buffer as a canonical 44-byte-header PCM16 mono WAV.
pub fn write_wav_bytes(buffer: &AudioBuffer) -> Result<Vec<u8>, AudioError> {
    let samples = buffer.samples();
    if let Some((index, &value)) = samples
        .iter()
        .enumerate()
        .find(|(_, s)| !(-1.0..=1.0).contains(*s))
    {
        return Err(AudioError::OutOfRange { index, value });
    }
    let data_len = samples.len() * 2;
    let riff_len = u32::try_from(36 + data_len).map_err(|_| {
        AudioError::InvalidParameter("buffer too long for a RIFF file".into())
    })?;
    let rate = buffer.sample_rate();

    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&riff_len.to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&rate.to_le_bytes());
    out.extend_from_slice(&(rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in samples {
        out.extend_from_slice(&quantize(s).to_le_bytes());
    }
    Ok(out)
}

pub fn write_wav(buffer: &AudioBuffer, path: impl AsRef<Path>) -> Result<(), AudioError> {
    let path = path.as_ref();
    let bytes = write_wav_bytes(buffer)?;
    fs::write(path, bytes).map_err(|source| AudioError::Io {
        path: path.display().to_string(),
        source,
    })
}
