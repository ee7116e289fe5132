//! Deterministic stand-ins for neural audio encoders, built from log-mel
//! band energies. Useful for tests and for exercising the evaluation
//! pipeline end to end without model weights.

use realfft::RealFftPlanner;

use super::lcs::LatentMatrix;
use super::similarity::Embedding;
use super::MetricError;
use crate::audio_io::Waveform;

const LOG_FLOOR: f64 = 1e-10;

/// Framing used by [`mock_embed`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MockFeatureParams {
    pub frame_size: usize,
    pub hop: usize,
    pub n_mels: usize,
}

impl Default for MockFeatureParams {
    fn default() -> Self {
        Self { frame_size: 1024, hop: 512, n_mels: 32 }
    }
}

fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular HTK-style filters over `0..=sr/2`, one row per band.
fn mel_filterbank(n_mels: usize, frame: usize, sample_rate: u32) -> Vec<Vec<(usize, f64)>> {
    let nyquist = f64::from(sample_rate) / 2.0;
    let top = hz_to_mel(nyquist);
    let edges: Vec<f64> = (0..n_mels + 2).map(|i| mel_to_hz(top * i as f64 / (n_mels + 1) as f64)).collect();
    let bin_hz = f64::from(sample_rate) / frame as f64;
    let bins = frame / 2 + 1;
    (0..n_mels)
        .map(|m| {
            let (lo, mid, hi) = (edges[m], edges[m + 1], edges[m + 2]);
            (0..bins)
                .filter_map(|k| {
                    let f = k as f64 * bin_hz;
                    let w = if f > lo && f <= mid {
                        (f - lo) / (mid - lo)
                    } else if f > mid && f < hi {
                        (hi - f) / (hi - mid)
                    } else {
                        0.0
                    };
                    (w > 0.0).then_some((k, w))
                })
                .collect()
        })
        .collect()
}

/// Mono mixdown as `f64`, averaging channels.
fn mono_f64(w: &Waveform) -> Vec<f64> {
    let n = w.num_channels() as f64;
    (0..w.len()).map(|i| w.channels().iter().map(|c| f64::from(c[i])).sum::<f64>() / n).collect()
}

/// Log10 mel energies for each frame starting at `0, hop, 2·hop, ...` that
/// fits entirely inside `samples`.
fn log_mel_frames(samples: &[f64], sample_rate: u32, frame: usize, hop: usize, n_mels: usize) -> Vec<Vec<f64>> {
    let bank = mel_filterbank(n_mels, frame, sample_rate);
    let window: Vec<f64> =
        (0..frame).map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / frame as f64).cos()).collect();
    let fft = RealFftPlanner::<f64>::new().plan_fft_forward(frame);
    let mut input = fft.make_input_vec();
    let mut spectrum = fft.make_output_vec();
    let count = if samples.len() < frame { 0 } else { 1 + (samples.len() - frame) / hop };
    let mut out = Vec::with_capacity(count);
    for f in 0..count {
        let seg = &samples[f * hop..f * hop + frame];
        for ((x, &s), &h) in input.iter_mut().zip(seg).zip(&window) {
            *x = s * h;
        }
        fft.process(&mut input, &mut spectrum).expect("buffer sizes come from the plan");
        let power: Vec<f64> = spectrum.iter().map(|c| c.norm_sqr() / frame as f64).collect();
        out.push(
            bank.iter()
                .map(|band| {
                    let e: f64 = band.iter().map(|&(k, w)| w * power[k]).sum();
                    e.max(LOG_FLOOR).log10()
                })
                .collect(),
        );
    }
    out
}

/// Clip embedding from per-band mean and standard deviation of log-mel
/// energies over time, z-scored across features, then tiled or truncated to
/// `dim`. A clip shorter than one frame is zero-padded to one frame.
pub fn mock_embed(w: &Waveform, dim: usize) -> Result<Embedding, MetricError> {
    mock_embed_with(w, dim, &MockFeatureParams::default())
}

pub fn mock_embed_with(w: &Waveform, dim: usize, params: &MockFeatureParams) -> Result<Embedding, MetricError> {
    if w.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    if dim == 0 || params.frame_size == 0 || params.hop == 0 || params.n_mels == 0 {
        return Err(MetricError::InvalidShape("dim, frame, hop and band count must be positive".into()));
    }
    let mut samples = mono_f64(w);
    if samples.len() < params.frame_size {
        samples.resize(params.frame_size, 0.0);
    }
    let frames = log_mel_frames(&samples, w.sample_rate(), params.frame_size, params.hop, params.n_mels);
    let n = frames.len() as f64;
    let mut features = Vec::with_capacity(2 * params.n_mels);
    let means: Vec<f64> = (0..params.n_mels).map(|b| frames.iter().map(|f| f[b]).sum::<f64>() / n).collect();
    features.extend(&means);
    features.extend((0..params.n_mels).map(|b| (frames.iter().map(|f| (f[b] - means[b]).powi(2)).sum::<f64>() / n).sqrt()));

    let mu = features.iter().sum::<f64>() / features.len() as f64;
    let sd = (features.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / features.len() as f64).sqrt();
    let normalized: Vec<f64> = if sd > 1e-12 {
        features.iter().map(|v| (v - mu) / sd).collect()
    } else {
        vec![1.0; features.len()]
    };
    let values = normalized.iter().copied().cycle().take(dim).collect();
    Embedding::new(format!("mock:{dim}"), values)
}

/// Latent stand-in: one log-mel vector of width `dim` per frame.
pub fn mock_latents(w: &Waveform, dim: usize, frame: usize, hop: usize) -> Result<LatentMatrix, MetricError> {
    if w.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    if dim == 0 || frame == 0 || hop == 0 {
        return Err(MetricError::InvalidShape("dim, frame and hop must be positive".into()));
    }
    let samples = mono_f64(w);
    let rows = log_mel_frames(&samples, w.sample_rate(), frame, hop, dim);
    if rows.len() < 3 {
        return Err(MetricError::TooShort { samples: samples.len(), frames: rows.len() });
    }
    LatentMatrix::from_rows("mock", &rows)
}
