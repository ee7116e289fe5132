//! Surrogate morph dataset construction.
//!
//! Each input pair gets an augmentation mode drawn from a [`ModeDistribution`],
//! a caption matching that mode, a rendered WAV, and the [`TimestepWindow`]
//! that restricts it to high-noise diffusion targets.

mod builder;
mod modes;
pub mod rng;

pub use builder::{
    build_dataset, read_manifest, read_pairs, write_manifest, BuildOptions, FailedEntry, ManifestEntry,
    ManifestRecord, PairSpec, AUDIO_DIR, MANIFEST_FILE,
};
pub use modes::{caption_for, sample_mode, sample_training_timestep, ModeDistribution, TimestepWindow};
pub use rng::SeededRng;

use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::audio_io::AudioError;
use crate::dsp::DspError;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("invalid mode distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid timestep window [{0}, {1}]: need 0 <= t_start < t_end <= 1")]
    InvalidWindow(f64, f64),
    #[error("caption labels must be non-empty")]
    EmptyLabel,
    #[error("duplicate pair id '{0}'")]
    DuplicateId(String),
    #[error("pair id '{0}' is not usable as a file name")]
    InvalidId(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Audio(#[from] AudioError),
    #[error(transparent)]
    Dsp(#[from] DspError),
}

impl DatasetError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }
}
