//! Surrogate morph construction.
//!
//! Two alignment techniques turn an additive mix of a primary and a secondary
//! sound into a surrogate morph:
//!
//! * **RMS anchoring** imposes the primary's framed RMS envelope on the mix
//!   ([`rms_envelope`], [`apply_rms_envelope`]).
//! * **Spectral interpolation** filters both sources toward their averaged
//!   magnitude spectrum and sums them ([`spectral_interpolate`]).
//!
//! [`augment_pair`] composes these per [`AugmentationMode`].
//!
//! Internally all arithmetic is `f64`; waveforms stay `f32`.

mod augment;
mod envelope;
mod mix;
mod spectral;

pub use augment::{augment_pair, AugmentationMode};
pub use envelope::{apply_rms_envelope, rms_envelope, RmsEnvelope};
pub use mix::{equal_power_mix, loop_or_truncate, match_power, rms};
pub use spectral::{
    apply_eq, eq_curve, magnitude_spectrum, smooth_gains, spectral_interpolate, spectral_target,
    EqCurve,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audio_io::AudioError;

#[derive(Debug, Error)]
pub enum DspError {
    #[error("empty input waveform")]
    EmptyInput,
    #[error("target length must be at least 1")]
    ZeroLength,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("EQ curve built for FFT size {curve} but signal has {signal} samples")]
    SizeMismatch { curve: usize, signal: usize },
    #[error("sample rate mismatch: {0} Hz vs {1} Hz")]
    SampleRateMismatch(u32, u32),
    #[error("channel count mismatch: {0} vs {1}")]
    ChannelMismatch(usize, usize),
    #[error("operation requires a mono waveform, got {0} channels")]
    NotMono(usize),
    #[error("secondary is silent (RMS below epsilon); equal-power scaling undefined")]
    SilentSecondary,
    #[error("primary is silent (RMS below epsilon)")]
    SilentPrimary,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Audio(#[from] AudioError),
}

/// Tunables for the augmentation pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentParams {
    /// RMS frame length in samples.
    pub rms_frame_size: usize,
    /// RMS hop in samples.
    pub rms_hop: usize,
    /// Width of the centred moving average applied to EQ gains, in bins. Odd.
    pub eq_smooth_window: usize,
    /// Floor added to every denominator (envelope and EQ ratios).
    pub epsilon: f64,
    /// Output is scaled down to this peak when it exceeds it.
    pub output_peak: f32,
}

impl Default for AugmentParams {
    fn default() -> Self {
        Self {
            rms_frame_size: 2048,
            rms_hop: 512,
            eq_smooth_window: 101,
            epsilon: 1e-8,
            output_peak: 0.95,
        }
    }
}

impl AugmentParams {
    pub fn validate(&self) -> Result<(), DspError> {
        let bad = |m: &str| Err(DspError::InvalidParams(m.to_string()));
        if self.rms_hop < 1 || self.rms_frame_size < self.rms_hop {
            return bad("need rms_frame_size >= rms_hop >= 1");
        }
        if self.eq_smooth_window == 0 || self.eq_smooth_window.is_multiple_of(2) {
            return bad("eq_smooth_window must be odd and >= 1");
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be positive and finite");
        }
        if !(self.output_peak > 0.0 && self.output_peak <= 1.0) {
            return bad("output_peak must lie in (0, 1]");
        }
        Ok(())
    }
}
