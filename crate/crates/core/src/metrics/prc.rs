//! k-NN manifold precision and recall.
//!
//! Each reference point owns a ball whose radius is the distance to its
//! k-th nearest other reference point. A query point is covered when it
//! lies inside (or on the boundary of) at least one ball. All distances are
//! exact and compared squared.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EmbeddingSet, MetricName, MetricResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrSpec {
    pub neighborhood_k: usize,
}

impl Default for PrSpec {
    fn default() -> Self {
        PrSpec { neighborhood_k: 3 }
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn rows<'a>(x: ArrayView2<'a, f64>) -> Vec<&'a [f64]> {
    let d = x.ncols().max(1);
    x.to_slice()
        .expect("standard layout")
        .chunks(d)
        .collect()
}

/// Squared distance from every row of `points` to its k-th nearest other row.
pub fn knn_radii_sq(points: ArrayView2<'_, f64>, k: usize) -> Result<Vec<f64>> {
    let n = points.nrows();
    if k == 0 || k >= n {
        return Err(Error::invalid(format!(
            "neighborhood k={k} must be in 1..{n} for a set of {n} points"
        )));
    }
    let owned;
    let points = if points.is_standard_layout() {
        points
    } else {
        owned = points.as_standard_layout().into_owned();
        owned.view()
    };
    let rows = rows(points);
    let mut dists = Vec::with_capacity(n - 1);
    Ok(rows
        .iter()
        .enumerate()
        .map(|(i, p)| {
            dists.clear();
            dists.extend(
                rows.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, q)| sq_dist(p, q)),
            );
            let (_, kth, _) = dists.select_nth_unstable_by(k - 1, f64::total_cmp);
            *kth
        })
        .collect())
}

/// Fraction of `queries` rows within some reference ball.
pub fn coverage_fraction(
    queries: ArrayView2<'_, f64>,
    reference: ArrayView2<'_, f64>,
    reference_radii_sq: &[f64],
) -> f64 {
    let q = queries.as_standard_layout();
    let r = reference.as_standard_layout();
    let refs = rows(r.view());
    let covered = rows(q.view())
        .into_iter()
        .filter(|g| {
            refs.iter()
                .zip(reference_radii_sq)
                .any(|(p, &radius)| sq_dist(g, p) <= radius)
        })
        .count();
    covered as f64 / queries.nrows() as f64
}

/// Precision (generated rows inside the real manifold) and recall (real
/// rows inside the generated manifold).
pub fn precision_recall(
    real: &EmbeddingSet,
    gen: &EmbeddingSet,
    spec: &PrSpec,
) -> Result<(MetricResult, MetricResult)> {
    real.check_comparable(gen)?;
    let k = spec.neighborhood_k;
    let real_radii = knn_radii_sq(real.data(), k)?;
    let gen_radii = knn_radii_sq(gen.data(), k)?;
    let precision = coverage_fraction(gen.data(), real.data(), &real_radii);
    let recall = coverage_fraction(real.data(), gen.data(), &gen_radii);
    let result = |name, value| {
        MetricResult::new(name, value, gen.n(), gen.backbone_id()).with_n_real(real.n())
    };
    Ok((
        result(MetricName::Precision, precision),
        result(MetricName::Recall, recall),
    ))
}
