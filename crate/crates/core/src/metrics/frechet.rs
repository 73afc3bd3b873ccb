use super::BackboneNaming;
use crate::error::{Error, Result};
use crate::model::{EmbeddingSet, MetricResult};
use crate::numstats::{mean_and_covariance, trace_sqrt_product_with, GaussianSummary};

/// Negative distances within this much of zero are round-off and clamp to 0.
pub const FRECHET_CLAMP_TOL: f64 = 1e-6;

/// `‖μ_r − μ_g‖² + Tr Σ_r + Tr Σ_g − 2 Tr((Σ_r Σ_g)^{1/2})`.
pub fn frechet_value(real: &GaussianSummary, gen: &GaussianSummary) -> Result<f64> {
    frechet_value_with(real, gen, 0.0)
}

/// [`frechet_value`] with `diagonal_offset` added to both covariances.
pub fn frechet_value_with(
    real: &GaussianSummary,
    gen: &GaussianSummary,
    diagonal_offset: f64,
) -> Result<f64> {
    if real.dim() != gen.dim() {
        return Err(Error::DimensionMismatch {
            left: real.dim(),
            right: gen.dim(),
        });
    }
    if diagonal_offset == 0.0
        && real.mean() == gen.mean()
        && real.covariance() == gen.covariance()
    {
        return Ok(0.0);
    }
    let mean_term: f64 = real
        .mean()
        .iter()
        .zip(gen.mean())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let dim = real.dim() as f64;
    let trace_r = real.covariance().diag().sum() + diagonal_offset * dim;
    let trace_g = gen.covariance().diag().sum() + diagonal_offset * dim;
    let cross = trace_sqrt_product_with(real.covariance(), gen.covariance(), diagonal_offset)?;
    let value = mean_term + trace_r + trace_g - 2.0 * cross;
    if value < 0.0 && value >= -FRECHET_CLAMP_TOL {
        Ok(0.0)
    } else {
        Ok(value)
    }
}

/// Fréchet distance between two embedding sets, named FID, FID* or FCD by
/// the feature space of their shared backbone.
pub fn frechet_distance(
    real: &EmbeddingSet,
    gen: &EmbeddingSet,
    naming: &BackboneNaming,
    diagonal_offset: f64,
) -> Result<MetricResult> {
    real.check_comparable(gen)?;
    let metric = naming.require_space(gen.backbone_id())?.frechet_metric();
    let r = mean_and_covariance(real)?;
    let g = mean_and_covariance(gen)?;
    let value = frechet_value_with(&r, &g, diagonal_offset)?;
    Ok(MetricResult::new(metric, value, gen.n(), gen.backbone_id()).with_n_real(real.n()))
}
