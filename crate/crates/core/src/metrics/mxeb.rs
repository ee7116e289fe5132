//! `MXEB` matrix files.
//!
//! Layout (all little-endian):
//!
//! ```text
//! offset 0   b"MXEB"
//! offset 4   version byte, 0x01
//! offset 5   u32 row count T
//! offset 9   u32 column count D
//! offset 13  T*D f32 values, row-major
//! ```
//!
//! A single embedding is stored with `T = 1`. Gaussian statistics use
//! `T = D + 1`: row 0 holds the mean, rows `1..=D` the covariance.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

use super::gaussian::GaussianStats;
use super::lcs::LatentMatrix;
use super::similarity::Embedding;
use super::MetricError;

pub const MAGIC: &[u8; 4] = b"MXEB";
pub const VERSION: u8 = 0x01;
const HEADER_LEN: usize = 13;

#[derive(Debug, Error)]
pub enum MxebError {
    #[error("bad magic bytes (not an MXEB file)")]
    BadMagic,
    #[error("unsupported MXEB version {0}")]
    UnsupportedVersion(u8),
    #[error("MXEB payload has {got} bytes, header declares {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("file too short for an MXEB header")]
    Truncated,
    #[error("MXEB shape {rows}x{cols} is not valid here: {reason}")]
    Shape { rows: usize, cols: usize, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Raw decoded MXEB contents.
#[derive(Debug, Clone, PartialEq)]
pub struct MxebMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f32>,
}

impl MxebMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f32>) -> Result<Self, MxebError> {
        if data.len() != rows * cols {
            return Err(MxebError::SizeMismatch { expected: rows * cols * 4, got: data.len() * 4 });
        }
        if u32::try_from(rows).is_err() || u32::try_from(cols).is_err() {
            return Err(MxebError::Shape { rows, cols, reason: "dimension exceeds u32".into() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_f64(rows: usize, cols: usize, data: &[f64]) -> Result<Self, MxebError> {
        Self::new(rows, cols, data.iter().map(|&v| v as f32).collect())
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_f64(&self, i: usize) -> Vec<f64> {
        self.row(i).iter().map(|&v| f64::from(v)).collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.data.len() * 4);
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&(self.rows as u32).to_le_bytes());
        out.extend_from_slice(&(self.cols as u32).to_le_bytes());
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, MxebError> {
        if bytes.len() < 4 || &bytes[..4] != MAGIC {
            return Err(if bytes.len() < 4 { MxebError::Truncated } else { MxebError::BadMagic });
        }
        if bytes.len() < HEADER_LEN {
            return Err(MxebError::Truncated);
        }
        if bytes[4] != VERSION {
            return Err(MxebError::UnsupportedVersion(bytes[4]));
        }
        let rows = u32::from_le_bytes(bytes[5..9].try_into().expect("4 bytes")) as usize;
        let cols = u32::from_le_bytes(bytes[9..13].try_into().expect("4 bytes")) as usize;
        let payload = &bytes[HEADER_LEN..];
        let expected = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(4))
            .ok_or(MxebError::Shape { rows, cols, reason: "size overflow".into() })?;
        if payload.len() != expected {
            return Err(MxebError::SizeMismatch { expected, got: payload.len() });
        }
        let data = payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect();
        Ok(Self { rows, cols, data })
    }

    pub fn read(path: &Path) -> Result<Self, MxebError> {
        let bytes = fs::read(path).map_err(|source| MxebError::Io { path: path.to_path_buf(), source })?;
        Self::from_bytes(&bytes)
    }

    pub fn write(&self, path: &Path) -> Result<(), MxebError> {
        fs::write(path, self.to_bytes()).map_err(|source| MxebError::Io { path: path.to_path_buf(), source })
    }

    pub fn from_embedding(e: &Embedding) -> Result<Self, MxebError> {
        Self::from_f64(1, e.dim(), e.values())
    }

    /// Interpret as a single embedding (`T = 1`).
    pub fn to_embedding(&self, clip_id: &str) -> Result<Embedding, MxebError> {
        if self.rows != 1 {
            return Err(MxebError::Shape { rows: self.rows, cols: self.cols, reason: "expected one row".into() });
        }
        Ok(Embedding::new(clip_id, self.row_f64(0))?)
    }

    /// Mean over rows, for files holding several frame-level embeddings.
    pub fn mean_embedding(&self, clip_id: &str) -> Result<Embedding, MxebError> {
        if self.rows == 0 {
            return Err(MxebError::Shape { rows: 0, cols: self.cols, reason: "no rows".into() });
        }
        let mut acc = vec![0.0f64; self.cols];
        for i in 0..self.rows {
            for (a, &v) in acc.iter_mut().zip(self.row(i)) {
                *a += f64::from(v);
            }
        }
        let n = self.rows as f64;
        Ok(Embedding::new(clip_id, acc.into_iter().map(|v| v / n).collect())?)
    }

    pub fn from_latents(m: &LatentMatrix) -> Result<Self, MxebError> {
        Self::from_f64(m.rows(), m.cols(), m.data())
    }

    pub fn to_latents(&self, clip_id: &str) -> Result<LatentMatrix, MxebError> {
        let data = self.data.iter().map(|&v| f64::from(v)).collect();
        Ok(LatentMatrix::new(clip_id, self.rows, self.cols, data)?)
    }

    pub fn from_stats(s: &GaussianStats) -> Result<Self, MxebError> {
        let d = s.dim();
        let mut data = Vec::with_capacity((d + 1) * d);
        data.extend(s.mean.iter().map(|&v| v as f32));
        for i in 0..d {
            data.extend(s.covariance.row(i).iter().map(|&v| v as f32));
        }
        Self::new(d + 1, d, data)
    }

    /// Interpret as Gaussian statistics. The sample count is not stored, so
    /// `count` must be supplied by the caller.
    pub fn to_stats(&self, count: usize) -> Result<GaussianStats, MxebError> {
        let d = self.cols;
        if self.rows != d + 1 || d == 0 {
            return Err(MxebError::Shape { rows: self.rows, cols: d, reason: "stats need D+1 rows".into() });
        }
        let mean = DVector::from_iterator(d, self.row(0).iter().map(|&v| f64::from(v)));
        let cov = DMatrix::from_row_iterator(d, d, self.data[d..].iter().map(|&v| f64::from(v)));
        Ok(GaussianStats::new(mean, repair_f32_rounding(cov), count)?)
    }
}

/// Rounding a singular covariance to f32 can leave eigenvalues slightly
/// below zero, far beyond f64 noise. Clip those (down to a few f32 ulps of
/// the largest eigenvalue) and rebuild; anything more negative is left for
/// the metric code to reject. Matrices that are already PSD pass unchanged.
fn repair_f32_rounding(cov: DMatrix<f64>) -> DMatrix<f64> {
    let sym = (&cov + cov.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    let tol = 8.0 * f64::from(f32::EPSILON) * cov.nrows() as f64 * max.abs();
    if min >= 0.0 || min < -tol {
        return cov;
    }
    let clipped = eig.eigenvalues.map(|v| v.max(0.0));
    let rebuilt = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    (&rebuilt + rebuilt.transpose()) * 0.5
}

pub fn read_stats(path: &Path) -> Result<GaussianStats, MxebError> {
    MxebMatrix::read(path)?.to_stats(0)
}

pub fn write_stats(path: &Path, stats: &GaussianStats) -> Result<(), MxebError> {
    MxebMatrix::from_stats(stats)?.write(path)
}
