//! Symmetric eigendecomposition, backed by faer's self-adjoint solver.
//!
//! faer is built without its rayon feature, so every kernel here runs
//! sequentially and results do not depend on thread scheduling.

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par, Side};
use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};

/// Relative symmetry tolerance: `|a_ij - a_ji| <= SYMMETRY_TOL * max(1, max|a|)`.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// Eigenpairs of a real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    /// Sorted descending.
    pub eigenvalues: Array1<f64>,
    /// Orthonormal columns; column `i` pairs with `eigenvalues[i]`.
    pub eigenvectors: Array2<f64>,
}

impl SymmetricEigen {
    /// `V diag(λ) Vᵀ`.
    pub fn reconstruct(&self) -> Array2<f64> {
        let scaled = &self.eigenvectors * &self.eigenvalues.view().insert_axis(ndarray::Axis(0));
        scaled.dot(&self.eigenvectors.t())
    }
}

/// Decomposes `s` as `V diag(λ) Vᵀ` with eigenvalues in descending order.
pub fn symmetric_eigen(s: ArrayView2<'_, f64>) -> Result<SymmetricEigen> {
    check_symmetric(s)?;
    let dim = s.nrows();
    let evd = to_faer(s)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::NoConvergence { dim })?;
    let values = evd.S().column_vector();
    let vectors = evd.U();
    // faer sorts ascending
    let eigenvalues = Array1::from_shape_fn(dim, |i| values[dim - 1 - i]);
    let eigenvectors = Array2::from_shape_fn((dim, dim), |(r, c)| vectors[(r, dim - 1 - c)]);
    Ok(SymmetricEigen {
        eigenvalues,
        eigenvectors,
    })
}

pub(crate) fn check_square(s: ArrayView2<'_, f64>) -> Result<()> {
    let (r, c) = s.dim();
    if r != c {
        return Err(Error::DimensionMismatch { left: r, right: c });
    }
    if r == 0 {
        return Err(Error::invalid("matrix is empty"));
    }
    if let Some(((i, j), v)) = s.indexed_iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite entry {v} at ({i},{j})")));
    }
    Ok(())
}

/// Largest absolute asymmetry `max |a_ij - a_ji|`.
pub(crate) fn symmetry_defect(s: ArrayView2<'_, f64>) -> f64 {
    let n = s.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((s[(i, j)] - s[(j, i)]).abs());
        }
    }
    worst
}

pub(crate) fn check_symmetric(s: ArrayView2<'_, f64>) -> Result<()> {
    check_square(s)?;
    let scale = s.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let defect = symmetry_defect(s);
    if defect > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric { defect });
    }
    Ok(())
}

pub(crate) fn to_faer(a: ArrayView2<'_, f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// `lhs * rhs` on the sequential kernel.
pub(crate) fn mat_mul(lhs: MatRef<'_, f64>, rhs: MatRef<'_, f64>) -> Mat<f64> {
    let mut out = Mat::zeros(lhs.nrows(), rhs.ncols());
    matmul(out.as_mut(), Accum::Replace, lhs, rhs, 1.0, Par::Seq);
    out
}

/// Ascending eigenvalues and matching eigenvectors of a symmetric faer matrix.
pub(crate) fn eigh(a: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::NoConvergence { dim: a.nrows() })?;
    let values = evd.S().column_vector().iter().copied().collect();
    Ok((values, evd.U().to_owned()))
}

/// Ascending eigenvalues of a symmetric faer matrix.
pub(crate) fn eigvalsh(a: &Mat<f64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::NoConvergence { dim: a.nrows() })
}
