//! Morph evaluation metrics.
//!
//! Similarity-based scores ([`correspondence`], [`intermediateness`],
//! [`directionality`]) work on clip and text embeddings, [`lcs`] on a clip's
//! latent frame matrix, and [`frechet_distance`] on Gaussian summaries of
//! embedding sets. [`spearman_rho`] and [`roc_auc`] validate a score against
//! human labels.

mod gaussian;
mod lcs;
mod mock;
pub mod mxeb;
mod rank;
mod similarity;
pub mod store;

pub use gaussian::{frechet_distance, gaussian_stats, sqrtm_psd, GaussianStats};
pub use lcs::{lcs, lcs_with, LatentMatrix, LcsOptions};
pub use mock::{mock_embed, mock_embed_with, mock_latents, MockFeatureParams};
pub use rank::{average_ranks, roc_auc, spearman_rho};
pub use similarity::{
    correspondence, cosine_sim, directionality, intermediateness, DirectionalityParams, Embedding, SIM_FLOOR,
};
pub use store::{EmbeddingStore, StoreError};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("empty input")]
    EmptyInput,
    #[error("non-finite value in input")]
    NonFinite,
    #[error("zero-norm vector")]
    ZeroVector,
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("both similarities are at or below the floor")]
    BothNonpositive,
    #[error("temperature must be positive and finite, got {0}")]
    InvalidTemperature(f64),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("need at least 3 frames, got {0}")]
    TooFewFrames(usize),
    #[error("all columns are constant (zero total variance)")]
    DegenerateMatrix,
    #[error("need at least the minimum number of samples, got {0}")]
    TooFewSamples(usize),
    #[error("covariance is not symmetric (relative asymmetry {0:.3e})")]
    NonSymmetric(f64),
    #[error("matrix is not positive semidefinite")]
    NotPositiveSemidefinite,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("input is constant; correlation undefined")]
    ConstantInput,
    #[error("labels contain a single class")]
    SingleClass,
    #[error("waveform of {samples} samples gives {frames} frames, need at least 3")]
    TooShort { samples: usize, frames: usize },
}
