use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::similarity::Embedding;
use super::MetricError;

/// Relative tolerance for covariance symmetry checks.
const SYMMETRY_TOL: f64 = 1e-9;
/// Negative eigenvalues no larger in magnitude than this fraction of the
/// largest eigenvalue are treated as rounding noise and clipped to zero.
const EIGEN_CLIP: f64 = 1e-10;

/// Mean and covariance of a set of embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianStats {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
    pub count: usize,
}

impl GaussianStats {
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>, count: usize) -> Result<Self, MetricError> {
        let d = mean.len();
        if d == 0 {
            return Err(MetricError::EmptyInput);
        }
        if covariance.nrows() != d || covariance.ncols() != d {
            return Err(MetricError::DimMismatch(d, covariance.nrows()));
        }
        if mean.iter().chain(covariance.iter()).any(|v| !v.is_finite()) {
            return Err(MetricError::NonFinite);
        }
        let stats = Self { mean, covariance, count };
        stats.check_symmetric()?;
        if stats.covariance.diagonal().iter().any(|&v| v < 0.0) {
            return Err(MetricError::NotPositiveSemidefinite);
        }
        Ok(stats)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Mean and unbiased covariance of the given rows.
    pub fn from_rows<'a, I>(rows: I) -> Result<Self, MetricError>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let rows: Vec<&[f64]> = rows.into_iter().collect();
        let n = rows.len();
        if n < 2 {
            return Err(MetricError::TooFewSamples(n));
        }
        let d = rows[0].len();
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(MetricError::DimMismatch(d, bad.len()));
        }
        let mut mean = DVector::zeros(d);
        for r in &rows {
            mean += DVector::from_column_slice(r);
        }
        mean /= n as f64;
        let mut centered = DMatrix::zeros(n, d);
        for (i, r) in rows.iter().enumerate() {
            for j in 0..d {
                centered[(i, j)] = r[j] - mean[j];
            }
        }
        let cov = centered.tr_mul(&centered) / (n - 1) as f64;
        let cov = (&cov + cov.transpose()) * 0.5;
        Self::new(mean, cov, n)
    }

    fn check_symmetric(&self) -> Result<(), MetricError> {
        let c = &self.covariance;
        let scale = c.amax().max(f64::MIN_POSITIVE);
        let asym = (c - c.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(MetricError::NonSymmetric(asym / scale));
        }
        Ok(())
    }
}

/// Gaussian fit of a set of embeddings.
pub fn gaussian_stats(embeddings: &[Embedding]) -> Result<GaussianStats, MetricError> {
    GaussianStats::from_rows(embeddings.iter().map(Embedding::values))
}

/// Eigenvalues of a symmetric PSD matrix with rounding-noise negatives
/// clipped to zero, together with its eigenvectors.
fn psd_eigen(m: DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>), MetricError> {
    let sym = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let max = eig.eigenvalues.max().max(0.0);
    let mut values = eig.eigenvalues;
    for v in values.iter_mut() {
        if *v < 0.0 {
            if *v < -EIGEN_CLIP * max && *v < -f64::EPSILON {
                return Err(MetricError::NotPositiveSemidefinite);
            }
            *v = 0.0;
        }
    }
    Ok((values, eig.eigenvectors))
}

/// Principal square root of a symmetric PSD matrix.
pub fn sqrtm_psd(m: &DMatrix<f64>) -> Result<DMatrix<f64>, MetricError> {
    let (values, vectors) = psd_eigen(m.clone())?;
    let root = DMatrix::from_diagonal(&values.map(f64::sqrt));
    Ok(&vectors * root * vectors.transpose())
}

/// Fréchet distance between two Gaussians:
/// `|μa-μb|² + tr(Σa + Σb - 2 (Σa^½ Σb Σa^½)^½)`, floored at zero.
pub fn frechet_distance(a: &GaussianStats, b: &GaussianStats) -> Result<f64, MetricError> {
    if a.dim() != b.dim() {
        return Err(MetricError::DimMismatch(a.dim(), b.dim()));
    }
    a.check_symmetric()?;
    b.check_symmetric()?;
    let diff = &a.mean - &b.mean;
    let sqrt_a = sqrtm_psd(&a.covariance)?;
    let inner = &sqrt_a * &b.covariance * &sqrt_a;
    let (values, _) = psd_eigen(inner)?;
    let tr_cross: f64 = values.iter().map(|v| v.sqrt()).sum();
    let d = diff.norm_squared() + a.covariance.trace() + b.covariance.trace() - 2.0 * tr_cross;
    Ok(d.max(0.0))
}
