use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::MetricError;

/// A clip's latent sequence: `rows` frames of `cols` latent dimensions,
/// stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentMatrix {
    pub clip_id: String,
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl LatentMatrix {
    pub fn new(clip_id: impl Into<String>, rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, MetricError> {
        if rows == 0 || cols == 0 {
            return Err(MetricError::InvalidShape(format!("{rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(MetricError::InvalidShape(format!("{rows}x{cols} needs {} values, got {}", rows * cols, data.len())));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(MetricError::NonFinite);
        }
        Ok(Self { clip_id: clip_id.into(), rows, cols, data })
    }

    pub fn from_rows(clip_id: impl Into<String>, rows: &[Vec<f64>]) -> Result<Self, MetricError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(MetricError::InvalidShape("ragged rows".into()));
        }
        Self::new(clip_id, rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// Options for [`lcs_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LcsOptions {
    /// Scale each column to unit variance before PCA (constant columns are
    /// left at zero). Off by default: plain PCA on centred latents.
    pub standardize: bool,
}

/// Latent compressibility: fraction of total variance carried by the first
/// two principal components of the frame matrix.
pub fn lcs(latents: &LatentMatrix) -> Result<f64, MetricError> {
    lcs_with(latents, LcsOptions::default())
}

pub fn lcs_with(latents: &LatentMatrix, opts: LcsOptions) -> Result<f64, MetricError> {
    let (t, d) = (latents.rows, latents.cols);
    if t < 3 {
        return Err(MetricError::TooFewFrames(t));
    }
    if d < 3 {
        return Err(MetricError::InvalidShape(format!("LCS needs at least 3 latent dimensions, got {d}")));
    }
    let mut x = DMatrix::from_row_slice(t, d, &latents.data);
    for mut col in x.column_iter_mut() {
        let mean = col.sum() / t as f64;
        col.add_scalar_mut(-mean);
        if opts.standardize {
            let sd = (col.norm_squared() / (t - 1) as f64).sqrt();
            if sd > 0.0 {
                col /= sd;
            }
        }
    }
    let total: f64 = x.norm_squared() / (t - 1) as f64;
    let scale = x.amax();
    if total <= 0.0 || scale == 0.0 {
        return Err(MetricError::DegenerateMatrix);
    }

    // The covariance XᵀX/(T-1) and the Gram matrix XXᵀ/(T-1) share their
    // nonzero spectrum; decompose whichever is smaller.
    let gram = if d <= t { x.tr_mul(&x) } else { &x * x.transpose() } / (t - 1) as f64;
    let mut eig: Vec<f64> = SymmetricEigen::new(gram).eigenvalues.iter().map(|v| v.max(0.0)).collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    let top2 = eig[0] + eig.get(1).copied().unwrap_or(0.0);
    Ok((top2 / total).clamp(0.0, 1.0))
}
