use realfft::num_complex::Complex;
use realfft::RealFftPlanner;

use super::mix::{add, check_compatible};
use super::{AugmentParams, DspError};
use crate::audio_io::Waveform;

/// Per-bin gain mask for a full-signal real FFT of length `fft_size`.
#[derive(Debug, Clone, PartialEq)]
pub struct EqCurve {
    pub gains: Vec<f64>,
    pub fft_size: usize,
}

impl EqCurve {
    /// Unit curve: passes the signal through unchanged.
    pub fn flat(fft_size: usize) -> Self {
        Self { gains: vec![1.0; fft_size / 2 + 1], fft_size }
    }
}

fn forward(samples: &[f32]) -> Vec<Complex<f64>> {
    let n = samples.len();
    let mut planner = RealFftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let mut input: Vec<f64> = samples.iter().map(|&s| f64::from(s)).collect();
    let mut spectrum = fft.make_output_vec();
    fft.process(&mut input, &mut spectrum).expect("buffer sizes come from the plan");
    spectrum
}

fn inverse(mut spectrum: Vec<Complex<f64>>, n: usize) -> Vec<f32> {
    let mut planner = RealFftPlanner::<f64>::new();
    let ifft = planner.plan_fft_inverse(n);
    // c2r ignores tiny imaginary parts only if they are exactly zero
    spectrum[0].im = 0.0;
    if n.is_multiple_of(2) {
        spectrum[n / 2].im = 0.0;
    }
    let mut out = ifft.make_output_vec();
    ifft.process(&mut spectrum, &mut out).expect("buffer sizes come from the plan");
    let scale = 1.0 / n as f64;
    out.into_iter().map(|v| (v * scale) as f32).collect()
}

/// FFT magnitudes of the non-redundant bins (`n/2 + 1` of them).
pub fn magnitude_spectrum(samples: &[f32]) -> Vec<f64> {
    if samples.is_empty() {
        return Vec::new();
    }
    forward(samples).iter().map(|c| c.norm()).collect()
}

/// Averaged target spectrum `0.5*|Y1| + 0.5*|Y2|`.
pub fn spectral_target(mag1: &[f64], mag2: &[f64]) -> Result<Vec<f64>, DspError> {
    if mag1.len() != mag2.len() {
        return Err(DspError::LengthMismatch(mag1.len(), mag2.len()));
    }
    Ok(mag1.iter().zip(mag2).map(|(a, b)| 0.5 * a + 0.5 * b).collect())
}

/// Centred moving average of width `window`; near the edges the window is
/// truncated and the mean taken over the bins that remain.
pub fn smooth_gains(raw: &[f64], window: usize) -> Vec<f64> {
    if window <= 1 {
        return raw.to_vec();
    }
    let half = window / 2;
    (0..raw.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(raw.len());
            raw[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// Gain mask moving `source_mag` toward `target_mag`.
pub fn eq_curve(
    target_mag: &[f64],
    source_mag: &[f64],
    fft_size: usize,
    smooth_window: usize,
    epsilon: f64,
) -> Result<EqCurve, DspError> {
    if target_mag.len() != source_mag.len() {
        return Err(DspError::LengthMismatch(target_mag.len(), source_mag.len()));
    }
    if target_mag.len() != fft_size / 2 + 1 {
        return Err(DspError::SizeMismatch { curve: fft_size, signal: target_mag.len() });
    }
    if smooth_window == 0 || smooth_window.is_multiple_of(2) {
        return Err(DspError::InvalidParams("smooth window must be odd and >= 1".into()));
    }
    let raw: Vec<f64> = target_mag.iter().zip(source_mag).map(|(&t, &s)| t / (s + epsilon)).collect();
    Ok(EqCurve { gains: smooth_gains(&raw, smooth_window), fft_size })
}

fn apply_eq_channel(samples: &[f32], curve: &EqCurve) -> Vec<f32> {
    let mut spectrum = forward(samples);
    for (bin, &g) in spectrum.iter_mut().zip(&curve.gains) {
        *bin *= g;
    }
    inverse(spectrum, samples.len())
}

/// Filter every channel of `w` by `curve` (magnitude only, phase untouched).
pub fn apply_eq(w: &Waveform, curve: &EqCurve) -> Result<Waveform, DspError> {
    if curve.fft_size != w.len() || curve.gains.len() != w.len() / 2 + 1 {
        return Err(DspError::SizeMismatch { curve: curve.fft_size, signal: w.len() });
    }
    if w.is_empty() {
        return Err(DspError::EmptyInput);
    }
    Ok(w.map_channels(|c| apply_eq_channel(c, curve)))
}

/// Project both signals onto their averaged magnitude spectrum and sum.
///
/// Channels are processed independently.
pub fn spectral_interpolate(w1: &Waveform, w2: &Waveform, params: &AugmentParams) -> Result<Waveform, DspError> {
    check_compatible(w1, w2)?;
    if w1.is_empty() {
        return Err(DspError::EmptyInput);
    }
    let n = w1.len();
    let mut filtered1 = Vec::with_capacity(w1.num_channels());
    let mut filtered2 = Vec::with_capacity(w1.num_channels());
    for (c1, c2) in w1.channels().iter().zip(w2.channels()) {
        let mag1 = magnitude_spectrum(c1);
        let mag2 = magnitude_spectrum(c2);
        let target = spectral_target(&mag1, &mag2)?;
        let eq1 = eq_curve(&target, &mag1, n, params.eq_smooth_window, params.epsilon)?;
        let eq2 = eq_curve(&target, &mag2, n, params.eq_smooth_window, params.epsilon)?;
        filtered1.push(apply_eq_channel(c1, &eq1));
        filtered2.push(apply_eq_channel(c2, &eq2));
    }
    let a = Waveform::new(filtered1, w1.sample_rate())?;
    let b = Waveform::new(filtered2, w1.sample_rate())?;
    Ok(add(&a, &b))
}
