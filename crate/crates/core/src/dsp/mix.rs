use super::DspError;
use crate::audio_io::Waveform;

/// Full-clip RMS over all channels.
pub fn rms(w: &Waveform) -> f64 {
    let n = (w.len() * w.num_channels()) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let energy: f64 = w.channels().iter().flatten().map(|&s| f64::from(s) * f64::from(s)).sum();
    (energy / n).sqrt()
}

/// Cut `w` to `target_len` samples, or repeat it head-to-tail until it
/// reaches that length. No crossfade at the loop seam.
pub fn loop_or_truncate(w: &Waveform, target_len: usize) -> Result<Waveform, DspError> {
    if w.is_empty() {
        return Err(DspError::EmptyInput);
    }
    if target_len == 0 {
        return Err(DspError::ZeroLength);
    }
    Ok(w.map_channels(|c| c.iter().copied().cycle().take(target_len).collect()))
}

/// Scale `w` so its full-clip RMS equals that of `reference`.
pub fn match_power(reference: &Waveform, w: &Waveform, epsilon: f64) -> Result<Waveform, DspError> {
    let ref_rms = rms(reference);
    let w_rms = rms(w);
    if ref_rms < epsilon {
        return Err(DspError::SilentPrimary);
    }
    if w_rms < epsilon {
        return Err(DspError::SilentSecondary);
    }
    let gain = ref_rms / w_rms;
    Ok(w.map_channels(|c| c.iter().map(|&s| (f64::from(s) * gain) as f32).collect()))
}

/// Sum `primary` with `secondary` rescaled to the primary's RMS (0 dB SNR).
pub fn equal_power_mix(primary: &Waveform, secondary: &Waveform, epsilon: f64) -> Result<Waveform, DspError> {
    check_compatible(primary, secondary)?;
    let scaled = match_power(primary, secondary, epsilon)?;
    Ok(add(primary, &scaled))
}

pub(crate) fn check_compatible(a: &Waveform, b: &Waveform) -> Result<(), DspError> {
    if a.sample_rate() != b.sample_rate() {
        return Err(DspError::SampleRateMismatch(a.sample_rate(), b.sample_rate()));
    }
    if a.num_channels() != b.num_channels() {
        return Err(DspError::ChannelMismatch(a.num_channels(), b.num_channels()));
    }
    if a.len() != b.len() {
        return Err(DspError::LengthMismatch(a.len(), b.len()));
    }
    Ok(())
}

/// Sample-wise sum of two compatible waveforms.
pub(crate) fn add(a: &Waveform, b: &Waveform) -> Waveform {
    let mut idx = 0;
    a.map_channels(|ca| {
        let cb = b.channel(idx);
        idx += 1;
        ca.iter().zip(cb).map(|(&x, &y)| x + y).collect()
    })
}
