use serde::{Deserialize, Serialize};

use super::DspError;
use crate::audio_io::Waveform;

/// Framed RMS amplitude contour.
///
/// Frame `k` covers samples `[k*hop, k*hop + frame_size)`, zero-padded past
/// the end of the source. Frames stop at the first one that reaches the end,
/// giving `1 + ceil((source_length - frame_size) / hop)` frames (one if the
/// source is shorter than a frame), so every frame holds at least
/// `frame_size - hop + 1` real samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmsEnvelope {
    pub frame_rms: Vec<f64>,
    pub frame_size: usize,
    pub hop: usize,
    pub source_length: usize,
}

impl RmsEnvelope {
    pub fn num_frames(&self) -> usize {
        self.frame_rms.len()
    }

    /// Midpoint of the part of frame `k` that lies inside the source.
    ///
    /// Strictly increasing in `k`; tail frames that run past the end are
    /// centred on their in-signal span.
    fn center(&self, k: usize) -> f64 {
        let start = k * self.hop;
        let end = (start + self.frame_size).min(self.source_length);
        (start + end - 1) as f64 / 2.0
    }
}

fn frame_count(len: usize, frame_size: usize, hop: usize) -> usize {
    1 + len.saturating_sub(frame_size).div_ceil(hop)
}

fn frame_rms_of(samples: &[f32], frame_size: usize, hop: usize) -> Vec<f64> {
    let n_frames = frame_count(samples.len(), frame_size, hop);
    (0..n_frames)
        .map(|k| {
            let start = k * hop;
            let end = (start + frame_size).min(samples.len());
            let energy: f64 = samples[start..end].iter().map(|&s| f64::from(s) * f64::from(s)).sum();
            (energy / frame_size as f64).sqrt()
        })
        .collect()
}

/// Measure the framed RMS envelope of a mono waveform.
pub fn rms_envelope(w: &Waveform, frame_size: usize, hop: usize) -> Result<RmsEnvelope, DspError> {
    if w.num_channels() != 1 {
        return Err(DspError::NotMono(w.num_channels()));
    }
    if w.is_empty() {
        return Err(DspError::EmptyInput);
    }
    if hop == 0 || frame_size < hop {
        return Err(DspError::InvalidParams("need frame_size >= hop >= 1".into()));
    }
    Ok(RmsEnvelope {
        frame_rms: frame_rms_of(w.channel(0), frame_size, hop),
        frame_size,
        hop,
        source_length: w.len(),
    })
}

/// Per-sample gain curve: linear between frame centres, held constant
/// before the first centre and after the last.
fn interpolate_gains(env: &RmsEnvelope, frame_gains: &[f64]) -> Vec<f64> {
    let centers: Vec<f64> = (0..frame_gains.len()).map(|k| env.center(k)).collect();
    let last = frame_gains.len() - 1;
    let mut k = 0;
    (0..env.source_length)
        .map(|i| {
            let t = i as f64;
            if t <= centers[0] {
                return frame_gains[0];
            }
            if t >= centers[last] {
                return frame_gains[last];
            }
            while centers[k + 1] < t {
                k += 1;
            }
            let frac = (t - centers[k]) / (centers[k + 1] - centers[k]);
            frame_gains[k] * (1.0 - frac) + frame_gains[k + 1] * frac
        })
        .collect()
}

/// Reshape `w` so that its framed RMS follows `target`.
///
/// Frame gains are `target / (own + epsilon)` where `own` is `w`'s envelope
/// measured with the target's framing.
pub fn apply_rms_envelope(target: &RmsEnvelope, w: &Waveform, epsilon: f64) -> Result<Waveform, DspError> {
    if w.num_channels() != 1 {
        return Err(DspError::NotMono(w.num_channels()));
    }
    if target.source_length != w.len() {
        return Err(DspError::LengthMismatch(target.source_length, w.len()));
    }
    let own = rms_envelope(w, target.frame_size, target.hop)?;
    debug_assert_eq!(own.num_frames(), target.num_frames());
    let frame_gains: Vec<f64> = target
        .frame_rms
        .iter()
        .zip(&own.frame_rms)
        .map(|(&t, &o)| t / (o + epsilon))
        .collect();
    let gains = interpolate_gains(target, &frame_gains);
    Ok(w.map_channels(|c| c.iter().zip(&gains).map(|(&s, &g)| (f64::from(s) * g) as f32).collect()))
}
