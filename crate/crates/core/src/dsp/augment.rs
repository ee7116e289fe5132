use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::envelope::{apply_rms_envelope, rms_envelope};
use super::mix::{equal_power_mix, loop_or_truncate, match_power, rms};
use super::spectral::spectral_interpolate;
use super::{AugmentParams, DspError};
use crate::audio_io::Waveform;

/// How a (primary, secondary) pair is turned into a surrogate morph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AugmentationMode {
    RmsOnly,
    SpectralOnly,
    Both,
    None,
}

impl AugmentationMode {
    /// Fixed order used for sampling and for mode distributions.
    pub const ALL: [AugmentationMode; 4] = [Self::RmsOnly, Self::SpectralOnly, Self::Both, Self::None];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::RmsOnly => "rms_only",
            Self::SpectralOnly => "spectral_only",
            Self::Both => "both",
            Self::None => "none",
        }
    }

    pub fn index(self) -> usize {
        match self {
            Self::RmsOnly => 0,
            Self::SpectralOnly => 1,
            Self::Both => 2,
            Self::None => 3,
        }
    }
}

impl fmt::Display for AugmentationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AugmentationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rms" | "rms_only" | "rms-only" => Ok(Self::RmsOnly),
            "spectral" | "spectral_only" | "spectral-only" => Ok(Self::SpectralOnly),
            "both" => Ok(Self::Both),
            "none" | "mix" => Ok(Self::None),
            other => Err(format!("unknown augmentation mode '{other}' (expected rms, spectral, both or none)")),
        }
    }
}

fn augment_mono(
    primary: &Waveform,
    secondary: &Waveform,
    mode: AugmentationMode,
    params: &AugmentParams,
) -> Result<Waveform, DspError> {
    let eps = params.epsilon;
    let anchor = |w: &Waveform| -> Result<Waveform, DspError> {
        let env = rms_envelope(primary, params.rms_frame_size, params.rms_hop)?;
        apply_rms_envelope(&env, w, eps)
    };
    match mode {
        AugmentationMode::None => equal_power_mix(primary, secondary, eps),
        AugmentationMode::RmsOnly => anchor(&equal_power_mix(primary, secondary, eps)?),
        AugmentationMode::SpectralOnly => {
            let balanced = match_power(primary, secondary, eps)?;
            spectral_interpolate(primary, &balanced, params)
        }
        AugmentationMode::Both => {
            let balanced = match_power(primary, secondary, eps)?;
            anchor(&spectral_interpolate(primary, &balanced, params)?)
        }
    }
}

fn peak_limit(w: Waveform, peak: f32) -> Waveform {
    let current = w.peak();
    if current <= peak {
        return w;
    }
    let gain = f64::from(peak) / f64::from(current);
    w.map_channels(|c| c.iter().map(|&s| (f64::from(s) * gain) as f32).collect())
}

/// Build one surrogate morph from a primary and a secondary clip.
///
/// The secondary is looped or truncated to the primary's length first. With
/// more than one channel, each channel pair goes through the pipeline on its
/// own. The result is scaled down to `params.output_peak` if it exceeds it.
pub fn augment_pair(
    primary: &Waveform,
    secondary: &Waveform,
    mode: AugmentationMode,
    params: &AugmentParams,
) -> Result<Waveform, DspError> {
    params.validate()?;
    if primary.sample_rate() != secondary.sample_rate() {
        return Err(DspError::SampleRateMismatch(primary.sample_rate(), secondary.sample_rate()));
    }
    if primary.num_channels() != secondary.num_channels() {
        return Err(DspError::ChannelMismatch(primary.num_channels(), secondary.num_channels()));
    }
    if primary.is_empty() || secondary.is_empty() {
        return Err(DspError::EmptyInput);
    }
    if rms(primary) < params.epsilon {
        return Err(DspError::SilentPrimary);
    }
    let secondary = loop_or_truncate(secondary, primary.len())?;
    let sr = primary.sample_rate();

    let out = if primary.num_channels() == 1 {
        augment_mono(primary, &secondary, mode, params)?
    } else {
        let mut channels = Vec::with_capacity(primary.num_channels());
        for (p, s) in primary.channels().iter().zip(secondary.channels()) {
            let p = Waveform::mono(p.clone(), sr)?;
            let s = Waveform::mono(s.clone(), sr)?;
            channels.extend(augment_mono(&p, &s, mode, params)?.into_channels());
        }
        Waveform::new(channels, sr)?
    };
    Ok(peak_limit(out, params.output_peak))
}
