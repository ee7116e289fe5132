//! JSON configuration shared by the command-line tools.
//!
//! Every field is optional; missing fields take their defaults. Unknown
//! fields are rejected. See the README for the full schema.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audio_io::BitDepth;
use crate::dataset::{BuildOptions, ModeDistribution, TimestepWindow};
use crate::dsp::AugmentParams;
use crate::eval::{EvalOptions, DEFAULT_TEMPLATE};
use crate::metrics::{DirectionalityParams, LcsOptions};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub seed: u64,
    pub mode_distribution: ModeDistribution,
    pub timestep_window: TimestepWindow,
    pub augment: AugmentParams,
    pub directionality: DirectionalityParams,
    pub lcs: LcsOptions,
    pub output_bit_depth: BitDepth,
    pub downmix: bool,
    /// Worker threads; 0 picks one per core.
    pub jobs: usize,
    pub prompt_template: String,
}

impl Default for CliConfig {
    fn default() -> Self {
        let build = BuildOptions::default();
        Self {
            seed: build.seed,
            mode_distribution: build.distribution,
            timestep_window: build.window,
            augment: build.params,
            directionality: DirectionalityParams::default(),
            lcs: LcsOptions::default(),
            output_bit_depth: build.bit_depth,
            downmix: build.downmix,
            jobs: build.jobs,
            prompt_template: DEFAULT_TEMPLATE.to_string(),
        }
    }
}

impl CliConfig {
    /// Read and validate a config file.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let cfg: Self =
            serde_json::from_str(&text).map_err(|source| ConfigError::Parse { path: path.to_path_buf(), source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self, ConfigError> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |e: &dyn std::fmt::Display| ConfigError::Invalid(e.to_string());
        self.mode_distribution.validate().map_err(|e| invalid(&e))?;
        self.timestep_window.validate().map_err(|e| invalid(&e))?;
        self.augment.validate().map_err(|e| invalid(&e))?;
        self.directionality.validate().map_err(|e| invalid(&e))?;
        if !(self.prompt_template.contains("{X}") && self.prompt_template.contains("{Y}")) {
            return Err(ConfigError::Invalid("prompt_template must contain {X} and {Y}".into()));
        }
        Ok(())
    }

    pub fn build_options(&self) -> BuildOptions {
        BuildOptions {
            distribution: self.mode_distribution,
            window: self.timestep_window,
            params: self.augment,
            seed: self.seed,
            bit_depth: self.output_bit_depth,
            downmix: self.downmix,
            jobs: self.jobs,
        }
    }

    pub fn eval_options(&self) -> EvalOptions {
        EvalOptions { directionality: self.directionality, lcs: self.lcs }
    }
}
