use serde::{Deserialize, Serialize};

use super::rng::SeededRng;
use super::DatasetError;
use crate::dsp::AugmentationMode;

/// Probability of each augmentation mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeDistribution {
    pub rms_only: f64,
    pub spectral_only: f64,
    pub both: f64,
    pub none: f64,
}

impl Default for ModeDistribution {
    /// Three-way split over the augmented modes; plain mixes never drawn.
    fn default() -> Self {
        Self::three_way()
    }
}

impl ModeDistribution {
    pub fn three_way() -> Self {
        let third = 1.0 / 3.0;
        Self { rms_only: third, spectral_only: third, both: third, none: 0.0 }
    }

    /// All mass on a single mode.
    pub fn only(mode: AugmentationMode) -> Self {
        let mut p = [0.0; 4];
        p[mode.index()] = 1.0;
        Self::from_array(p)
    }

    pub fn from_array(p: [f64; 4]) -> Self {
        Self { rms_only: p[0], spectral_only: p[1], both: p[2], none: p[3] }
    }

    /// Probabilities in the sampling order of [`AugmentationMode::ALL`].
    pub fn as_array(&self) -> [f64; 4] {
        [self.rms_only, self.spectral_only, self.both, self.none]
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let p = self.as_array();
        if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(DatasetError::InvalidDistribution(format!("negative or non-finite probability in {p:?}")));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(DatasetError::InvalidDistribution(format!("probabilities sum to {sum}, expected 1")));
        }
        Ok(())
    }
}

/// Draw a mode by inverse CDF over (RmsOnly, SpectralOnly, Both, None).
pub fn sample_mode(rng: &mut SeededRng, dist: &ModeDistribution) -> Result<AugmentationMode, DatasetError> {
    dist.validate()?;
    let p = dist.as_array();
    let u = rng.next_f64();
    let mut cumulative = 0.0;
    for (mode, &prob) in AugmentationMode::ALL.iter().zip(&p) {
        cumulative += prob;
        if u < cumulative && prob > 0.0 {
            return Ok(*mode);
        }
    }
    // u landed in the rounding gap above the final cumulative sum
    let last = p.iter().rposition(|&v| v > 0.0).expect("validated distribution has mass");
    Ok(AugmentationMode::ALL[last])
}

/// Training caption for a surrogate built with `mode` from concepts `x`
/// (primary) and `y` (secondary).
pub fn caption_for(mode: AugmentationMode, x: &str, y: &str) -> Result<String, DatasetError> {
    if x.trim().is_empty() || y.trim().is_empty() {
        return Err(DatasetError::EmptyLabel);
    }
    Ok(match mode {
        AugmentationMode::RmsOnly => format!("The behavior of {x} with textures from {x} and {y}"),
        AugmentationMode::SpectralOnly => format!("A spectral blend of {x} and {y}"),
        AugmentationMode::Both => format!("The behavior of {x} with a spectral blend of {x} and {y}"),
        AugmentationMode::None => format!("A mix of {x} and {y}"),
    })
}

/// Range of diffusion timesteps, `t` in `[0, 1]` with 1 the noisiest, at
/// which a surrogate example may be used as a training target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimestepWindow {
    pub t_start: f64,
    pub t_end: f64,
}

impl Default for TimestepWindow {
    fn default() -> Self {
        Self { t_start: 0.5, t_end: 1.0 }
    }
}

impl TimestepWindow {
    pub fn new(t_start: f64, t_end: f64) -> Result<Self, DatasetError> {
        let w = Self { t_start, t_end };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let ok = (0.0..=1.0).contains(&self.t_start) && (0.0..=1.0).contains(&self.t_end) && self.t_start < self.t_end;
        if ok {
            Ok(())
        } else {
            Err(DatasetError::InvalidWindow(self.t_start, self.t_end))
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.t_start <= t && t <= self.t_end
    }
}

/// Draw a training timestep uniformly from the window.
pub fn sample_training_timestep(rng: &mut SeededRng, window: &TimestepWindow) -> f64 {
    let t = window.t_start + rng.next_f64() * (window.t_end - window.t_start);
    t.clamp(window.t_start, window.t_end)
}
