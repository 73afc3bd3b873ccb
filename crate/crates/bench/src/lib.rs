//! Seeded inputs shared by the benchmarks.

use geneval_core::{EmbeddingSet, ProbabilitySet};
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn gaussian(n: usize, d: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_fn((n, d), |_| StandardNormal.sample(&mut rng))
}

pub fn embeddings(n: usize, d: usize, seed: u64) -> EmbeddingSet {
    EmbeddingSet::new(gaussian(n, d, seed), "base", "bench").expect("finite data")
}

/// Softmax of Gaussian logits.
pub fn probabilities(n: usize, classes: usize, seed: u64) -> ProbabilitySet {
    let mut p = gaussian(n, classes, seed).mapv(f64::exp);
    for mut row in p.rows_mut() {
        let s = row.sum();
        row.mapv_inplace(|v| v / s);
    }
    ProbabilitySet::new(p, "base", "bench").expect("valid rows")
}

/// Sample covariance of `n` Gaussian rows in `d` dimensions (rank min(n-1, d)).
pub fn covariance(n: usize, d: usize, seed: u64) -> Array2<f64> {
    let x = gaussian(n, d, seed);
    let centered = &x - &x.mean_axis(ndarray::Axis(0)).expect("n > 0");
    let mut c = centered.t().dot(&centered) / (n - 1) as f64;
    for i in 0..d {
        for j in 0..i {
            let v = 0.5 * (c[(i, j)] + c[(j, i)]);
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    c
}
