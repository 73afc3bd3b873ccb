//! Gaussian summaries of embedding sets and the matrix functions behind
//! the Fréchet distance.

mod eigen;

pub use eigen::{symmetric_eigen, SymmetricEigen, SYMMETRY_TOL};

use faer::Mat;
use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::model::EmbeddingSet;
use eigen::{check_square, check_symmetric, eigh, eigvalsh, mat_mul, symmetry_defect, to_faer};

/// Eigenvalues down to `-PSD_CLAMP_TOL * λ_max` are round-off and get
/// clamped to zero; anything more negative is rejected.
pub const PSD_CLAMP_TOL: f64 = 1e-5;

/// Looser PSD check applied when a summary is built from external matrices.
const SUMMARY_PSD_TOL: f64 = 1e-6;

/// Mean vector and covariance matrix of an embedding set.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSummary {
    mean: Array1<f64>,
    covariance: Array2<f64>,
    sample_count: usize,
}

impl GaussianSummary {
    /// Builds a summary from precomputed moments, checking symmetry and
    /// positive semi-definiteness.
    pub fn new(mean: Array1<f64>, covariance: Array2<f64>, sample_count: usize) -> Result<Self> {
        if sample_count < 2 {
            return Err(Error::invalid(format!(
                "sample_count must be at least 2, got {sample_count}"
            )));
        }
        check_square(covariance.view())?;
        if covariance.nrows() != mean.len() {
            return Err(Error::DimensionMismatch {
                left: mean.len(),
                right: covariance.nrows(),
            });
        }
        if mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("mean has non-finite entries"));
        }
        let defect = symmetry_defect(covariance.view());
        if defect > 1e-8 {
            return Err(Error::NotSymmetric { defect });
        }
        let values = eigvalsh(&to_faer(covariance.view()))?;
        let largest = values.last().copied().unwrap_or(0.0).max(0.0);
        let smallest = values.first().copied().unwrap_or(0.0);
        if smallest < -SUMMARY_PSD_TOL * largest || (largest == 0.0 && smallest < 0.0) {
            return Err(Error::NotPositiveSemidefinite {
                eigenvalue: smallest,
                largest,
            });
        }
        Ok(GaussianSummary {
            mean,
            covariance,
            sample_count,
        })
    }

    pub fn mean(&self) -> ArrayView1<'_, f64> {
        self.mean.view()
    }

    pub fn covariance(&self) -> ArrayView2<'_, f64> {
        self.covariance.view()
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Row mean and unbiased (N−1) covariance, symmetrized exactly.
pub fn mean_and_covariance(x: &EmbeddingSet) -> Result<GaussianSummary> {
    let n = x.n();
    if n < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 samples for a covariance, got {n}"
        )));
    }
    let data = x.data();
    let mean = data.mean_axis(Axis(0)).expect("n >= 2");
    let centered = &data - &mean.view().insert_axis(Axis(0));
    let c = to_faer(centered.view());
    let gram = mat_mul(c.transpose(), c.as_ref());
    let d = x.d();
    let scale = 1.0 / (n - 1) as f64;
    let covariance =
        Array2::from_shape_fn((d, d), |(i, j)| 0.5 * (gram[(i, j)] + gram[(j, i)]) * scale);
    Ok(GaussianSummary {
        mean,
        covariance,
        sample_count: n,
    })
}

/// `Tr((Σ_r Σ_g)^{1/2})` through the symmetric route
/// `Tr((Σ_r^{1/2} Σ_g Σ_r^{1/2})^{1/2})`.
pub fn trace_sqrt_product(sigma_r: ArrayView2<'_, f64>, sigma_g: ArrayView2<'_, f64>) -> Result<f64> {
    trace_sqrt_product_with(sigma_r, sigma_g, 0.0)
}

/// As [`trace_sqrt_product`], adding `diagonal_offset` to both diagonals first.
pub fn trace_sqrt_product_with(
    sigma_r: ArrayView2<'_, f64>,
    sigma_g: ArrayView2<'_, f64>,
    diagonal_offset: f64,
) -> Result<f64> {
    check_symmetric(sigma_r)?;
    check_symmetric(sigma_g)?;
    if sigma_r.nrows() != sigma_g.nrows() {
        return Err(Error::DimensionMismatch {
            left: sigma_r.nrows(),
            right: sigma_g.nrows(),
        });
    }
    if !(diagonal_offset >= 0.0 && diagonal_offset.is_finite()) {
        return Err(Error::invalid(format!(
            "diagonal offset must be a finite non-negative number, got {diagonal_offset}"
        )));
    }
    let mut r = to_faer(sigma_r);
    let mut g = to_faer(sigma_g);
    if diagonal_offset > 0.0 {
        for i in 0..r.nrows() {
            r[(i, i)] += diagonal_offset;
            g[(i, i)] += diagonal_offset;
        }
    }

    let (values, vectors) = eigh(&r)?;
    let kept = clamp_psd(&values)?;

    // Σ_r^{1/2} Σ_g Σ_r^{1/2} = U W Uᵀ with W = D^{1/2} Uᵀ Σ_g U D^{1/2}.
    // Columns of U with zero eigenvalue add only zeros to W's spectrum.
    if kept.is_empty() {
        return Ok(0.0);
    }
    let half = Mat::from_fn(vectors.nrows(), kept.len(), |i, k| {
        let (col, lambda) = kept[k];
        vectors[(i, col)] * lambda.sqrt()
    });
    let g_half = mat_mul(g.as_ref(), half.as_ref());
    let inner = mat_mul(half.transpose(), g_half.as_ref());
    let m = inner.nrows();
    let inner = Mat::from_fn(m, m, |i, j| 0.5 * (inner[(i, j)] + inner[(j, i)]));

    let inner_values = eigvalsh(&inner)?;
    let inner_kept = clamp_psd(&inner_values)?;
    Ok(inner_kept.iter().map(|&(_, v)| v.sqrt()).sum())
}

/// Indices and values of the eigenvalues above the numerical rank cutoff
/// `len · ε · λmax`. `values` must be ascending.
fn clamp_psd(values: &[f64]) -> Result<Vec<(usize, f64)>> {
    let largest = values.last().copied().unwrap_or(0.0).max(0.0);
    let smallest = values.first().copied().unwrap_or(0.0);
    if smallest < -PSD_CLAMP_TOL * largest || (largest == 0.0 && smallest < 0.0) {
        return Err(Error::NotPositiveSemidefinite {
            eigenvalue: smallest,
            largest,
        });
    }
    let cutoff = values.len() as f64 * f64::EPSILON * largest;
    Ok(values
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, v)| v > cutoff)
        .collect())
}
