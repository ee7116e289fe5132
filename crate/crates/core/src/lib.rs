//! Surrogate morph training data and morph evaluation for audio.
//!
//! * [`audio_io`]: WAV reading and writing.
//! * [`dsp`]: RMS anchoring, spectral interpolation and 0 dB mixing.
//! * [`dataset`]: seeded mode sampling, captions, timestep windows and the
//!   parallel dataset builder.
//! * [`metrics`]: LCS, correspondence, intermediateness, directionality, FAD
//!   and rank statistics, plus the MXEB file format and embedding store.
//! * [`eval`]: prompt expansion, corpus scoring and report rendering.
//! * [`config`]: the JSON config read by the `surromorph` binary.

pub mod audio_io;
pub mod config;
pub mod dataset;
pub mod dsp;
pub mod eval;
pub mod metrics;
