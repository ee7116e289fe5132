//! WAV decoding/encoding and channel handling.
//!
//! Every sample is held as `f32` in nominal range `[-1, 1]`. Integer PCM is
//! normalised by `2^(bits-1)`, which makes 16- and 24-bit files round-trip
//! exactly through [`load_wav`] and [`save_wav`].

use std::io;
use std::path::{Path, PathBuf};

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};
use thiserror::Error;

/// Errors produced while reading, writing or constructing audio.
#[derive(Debug, Error)]
pub enum AudioError {
    #[error("{path}: not a RIFF/WAVE file ({reason})")]
    MalformedHeader { path: PathBuf, reason: String },
    #[error("{path}: unsupported encoding ({reason})")]
    UnsupportedEncoding { path: PathBuf, reason: String },
    #[error("{path}: data chunk shorter than declared")]
    TruncatedData { path: PathBuf },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("invalid waveform: {0}")]
    InvalidWaveform(String),
}

/// Output sample encoding for [`save_wav`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum BitDepth {
    #[serde(rename = "16")]
    Pcm16,
    #[serde(rename = "24")]
    Pcm24,
    #[serde(rename = "32f")]
    Float32,
}

impl BitDepth {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "16" => Some(Self::Pcm16),
            "24" => Some(Self::Pcm24),
            "32f" | "32" | "float" => Some(Self::Float32),
            _ => None,
        }
    }
}

/// Multichannel audio with a sample rate.
///
/// All channels have identical length and the sample rate is positive. The
/// value is immutable once built; operations return new waveforms.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    channels: Vec<Vec<f32>>,
    sample_rate: u32,
}

impl Waveform {
    pub fn new(channels: Vec<Vec<f32>>, sample_rate: u32) -> Result<Self, AudioError> {
        if sample_rate == 0 {
            return Err(AudioError::InvalidWaveform("sample rate must be positive".into()));
        }
        if channels.is_empty() {
            return Err(AudioError::InvalidWaveform("no channels".into()));
        }
        let len = channels[0].len();
        if channels.iter().any(|c| c.len() != len) {
            return Err(AudioError::InvalidWaveform("channels have unequal lengths".into()));
        }
        Ok(Self { channels, sample_rate })
    }

    pub fn mono(samples: Vec<f32>, sample_rate: u32) -> Result<Self, AudioError> {
        Self::new(vec![samples], sample_rate)
    }

    pub fn channels(&self) -> &[Vec<f32>] {
        &self.channels
    }

    pub fn channel(&self, idx: usize) -> &[f32] {
        &self.channels[idx]
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    /// Samples per channel.
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn into_channels(self) -> Vec<Vec<f32>> {
        self.channels
    }

    /// Largest absolute sample value over all channels.
    pub fn peak(&self) -> f32 {
        self.channels
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f32, |m, &s| m.max(s.abs()))
    }

    /// Apply `f` to every channel, keeping the sample rate.
    pub fn map_channels<F>(&self, mut f: F) -> Self
    where
        F: FnMut(&[f32]) -> Vec<f32>,
    {
        let channels: Vec<Vec<f32>> = self.channels.iter().map(|c| f(c)).collect();
        debug_assert!(channels.iter().all(|c| c.len() == channels[0].len()));
        Self { channels, sample_rate: self.sample_rate }
    }
}

fn map_hound_error(path: &Path, err: hound::Error) -> AudioError {
    let path = path.to_path_buf();
    match err {
        hound::Error::IoError(e) => AudioError::Io { path, source: e },
        hound::Error::FormatError(reason) => AudioError::MalformedHeader { path, reason: reason.into() },
        hound::Error::Unsupported => AudioError::UnsupportedEncoding {
            path,
            reason: "format tag or layout not supported".into(),
        },
        hound::Error::UnfinishedSample => AudioError::TruncatedData { path },
        other => AudioError::MalformedHeader { path, reason: other.to_string() },
    }
}

// The header already parsed, so a failed read means the data chunk ends early.
fn sample_read_error(path: &Path, err: hound::Error) -> AudioError {
    match err {
        hound::Error::IoError(_) => AudioError::TruncatedData { path: path.to_path_buf() },
        other => map_hound_error(path, other),
    }
}

/// Decode a PCM16, PCM24 or IEEE-float32 WAV file with one or two channels.
pub fn load_wav(path: impl AsRef<Path>) -> Result<Waveform, AudioError> {
    let path = path.as_ref();
    let reader = WavReader::open(path).map_err(|e| match e {
        // A file that ends inside the header is not a WAV file at all.
        hound::Error::IoError(io_err) if io_err.kind() == io::ErrorKind::UnexpectedEof => {
            AudioError::MalformedHeader { path: path.to_path_buf(), reason: "file ends inside header".into() }
        }
        other => map_hound_error(path, other),
    })?;
    let spec = reader.spec();
    let n_channels = spec.channels as usize;
    if !(1..=2).contains(&n_channels) {
        return Err(AudioError::UnsupportedEncoding {
            path: path.to_path_buf(),
            reason: format!("{n_channels} channels"),
        });
    }
    if spec.sample_rate == 0 {
        return Err(AudioError::MalformedHeader { path: path.to_path_buf(), reason: "zero sample rate".into() });
    }

    let interleaved: Vec<f32> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) | (SampleFormat::Int, 24) => {
            let scale = 1.0 / f64::from(1u32 << (spec.bits_per_sample - 1));
            reader
                .into_samples::<i32>()
                .map(|s| s.map(|v| (f64::from(v) * scale) as f32))
                .collect::<Result<_, _>>()
                .map_err(|e| sample_read_error(path, e))?
        }
        (SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .collect::<Result<_, _>>()
            .map_err(|e| sample_read_error(path, e))?,
        (fmt, bits) => {
            return Err(AudioError::UnsupportedEncoding {
                path: path.to_path_buf(),
                reason: format!("{fmt:?} {bits}-bit"),
            })
        }
    };

    if !interleaved.len().is_multiple_of(n_channels) {
        return Err(AudioError::TruncatedData { path: path.to_path_buf() });
    }
    let frames = interleaved.len() / n_channels;
    let mut channels = vec![Vec::with_capacity(frames); n_channels];
    for frame in interleaved.chunks_exact(n_channels) {
        for (ch, &s) in channels.iter_mut().zip(frame) {
            ch.push(s);
        }
    }
    Waveform::new(channels, spec.sample_rate)
}

/// Quantise a float sample to a signed integer of `bits` bits.
///
/// Clamps to `[-1, 1]`, scales by `2^(bits-1)`, rounds half away from zero
/// and saturates at the positive end (`1.0` maps to `2^(bits-1) - 1`).
pub fn quantize(sample: f32, bits: u32) -> i32 {
    let full = f64::from(1u32 << (bits - 1));
    let x = f64::from(sample).clamp(-1.0, 1.0);
    let q = (x * full).round();
    q.clamp(-full, full - 1.0) as i32
}

/// Encode a waveform as WAV at the requested bit depth.
pub fn save_wav(w: &Waveform, path: impl AsRef<Path>, depth: BitDepth) -> Result<(), AudioError> {
    let path = path.as_ref();
    if w.channels.iter().any(|c| c.len() != w.len()) {
        return Err(AudioError::InvalidWaveform("channels have unequal lengths".into()));
    }
    if w.channels.iter().flatten().any(|s| !s.is_finite()) {
        return Err(AudioError::InvalidWaveform("non-finite sample".into()));
    }
    let (bits, format) = match depth {
        BitDepth::Pcm16 => (16, SampleFormat::Int),
        BitDepth::Pcm24 => (24, SampleFormat::Int),
        BitDepth::Float32 => (32, SampleFormat::Float),
    };
    let spec = WavSpec {
        channels: w.num_channels() as u16,
        sample_rate: w.sample_rate,
        bits_per_sample: bits,
        sample_format: format,
    };
    let io_err = |e: hound::Error| match e {
        hound::Error::IoError(source) => AudioError::Io { path: path.to_path_buf(), source },
        other => AudioError::InvalidWaveform(other.to_string()),
    };
    let mut writer = WavWriter::create(path, spec).map_err(io_err)?;
    for i in 0..w.len() {
        for ch in &w.channels {
            let s = ch[i];
            match depth {
                BitDepth::Float32 => writer.write_sample(s),
                BitDepth::Pcm16 => writer.write_sample(quantize(s, 16) as i16),
                BitDepth::Pcm24 => writer.write_sample(quantize(s, 24)),
            }
            .map_err(io_err)?;
        }
    }
    writer.finalize().map_err(io_err)
}

/// Average stereo to mono (`0.5 L + 0.5 R`); mono input is returned as is.
pub fn to_mono(w: &Waveform) -> Result<Waveform, AudioError> {
    match w.num_channels() {
        1 => Ok(w.clone()),
        2 => {
            let (l, r) = (&w.channels[0], &w.channels[1]);
            let mixed = l.iter().zip(r).map(|(&a, &b)| 0.5 * a + 0.5 * b).collect();
            Waveform::mono(mixed, w.sample_rate)
        }
        n => Err(AudioError::InvalidWaveform(format!("to_mono expects 1 or 2 channels, got {n}"))),
    }
}
