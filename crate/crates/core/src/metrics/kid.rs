use ndarray::{ArrayView1, ArrayView2, Axis};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::mean_std;
use crate::error::{Error, Result};
use crate::model::{EmbeddingSet, MetricName, MetricResult};

/// Subset sampling and kernel parameters for the kernel distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KidSpec {
    /// Rows drawn from each set per subset; `None` means
    /// `min(1000, n_real, n_gen)`.
    pub subset_size: Option<usize>,
    pub subset_count: usize,
    pub kernel_degree: u32,
    /// `None` means `1 / d`.
    pub kernel_gamma: Option<f64>,
    pub kernel_coef: f64,
    pub seed: u64,
}

impl Default for KidSpec {
    fn default() -> Self {
        KidSpec {
            subset_size: None,
            subset_count: 100,
            kernel_degree: 3,
            kernel_gamma: None,
            kernel_coef: 1.0,
            seed: 0,
        }
    }
}

/// `k(x, y) = (γ xᵀy + c)^degree`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolynomialKernel {
    pub gamma: f64,
    pub coef: f64,
    pub degree: u32,
}

impl PolynomialKernel {
    /// The conventional kernel for `d`-dimensional features: `(xᵀy/d + 1)³`.
    pub fn standard(d: usize) -> Self {
        PolynomialKernel {
            gamma: 1.0 / d as f64,
            coef: 1.0,
            degree: 3,
        }
    }

    pub fn eval(&self, x: ArrayView1<'_, f64>, y: ArrayView1<'_, f64>) -> f64 {
        self.apply(x.dot(&y))
    }

    fn apply(&self, dot: f64) -> f64 {
        (self.gamma * dot + self.coef).powi(self.degree as i32)
    }
}

/// Unbiased MMD² between the rows of `x` and `y` (equal row counts m ≥ 2).
pub fn kid_subset_estimate(
    x: ArrayView2<'_, f64>,
    y: ArrayView2<'_, f64>,
    kernel: &PolynomialKernel,
) -> f64 {
    let m = x.nrows();
    debug_assert_eq!(m, y.nrows());
    let kxx = x.dot(&x.t());
    let kyy = y.dot(&y.t());
    let kxy = x.dot(&y.t());
    let off_diagonal = |gram: &ndarray::Array2<f64>| {
        let mut total = 0.0;
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    total += kernel.apply(gram[(i, j)]);
                }
            }
        }
        total
    };
    let cross: f64 = kxy.iter().map(|&v| kernel.apply(v)).sum();
    let mf = m as f64;
    off_diagonal(&kxx) / (mf * (mf - 1.0)) + off_diagonal(&kyy) / (mf * (mf - 1.0))
        - 2.0 * cross / (mf * mf)
}

/// Per-subset estimates, in draw order.
pub fn kid_subset_values(
    real: &EmbeddingSet,
    gen: &EmbeddingSet,
    spec: &KidSpec,
) -> Result<Vec<f64>> {
    real.check_comparable(gen)?;
    let available = real.n().min(gen.n());
    let m = spec.subset_size.unwrap_or(available.min(1000));
    if m < 2 {
        return Err(Error::invalid(format!(
            "KID subset size must be at least 2, got {m}"
        )));
    }
    if m > available {
        return Err(Error::invalid(format!(
            "KID subset size {m} exceeds available rows (real {}, gen {})",
            real.n(),
            gen.n()
        )));
    }
    if spec.subset_count == 0 {
        return Err(Error::invalid("KID subset count must be at least 1"));
    }
    let kernel = PolynomialKernel {
        gamma: spec.kernel_gamma.unwrap_or(1.0 / real.d() as f64),
        coef: spec.kernel_coef,
        degree: spec.kernel_degree,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (xr, xg) = (real.data(), gen.data());
    let mut values = Vec::with_capacity(spec.subset_count);
    for _ in 0..spec.subset_count {
        let ri = index::sample(&mut rng, real.n(), m).into_vec();
        let gi = index::sample(&mut rng, gen.n(), m).into_vec();
        let x = xr.select(Axis(0), &ri);
        let y = xg.select(Axis(0), &gi);
        values.push(kid_subset_estimate(x.view(), y.view(), &kernel));
    }
    Ok(values)
}

/// Kernel distance: mean ± population std of the per-subset estimates.
/// Values may be slightly negative.
pub fn kid(real: &EmbeddingSet, gen: &EmbeddingSet, spec: &KidSpec) -> Result<MetricResult> {
    let values = kid_subset_values(real, gen, spec)?;
    let (mean, std) = mean_std(&values);
    Ok(MetricResult::new(MetricName::KID, mean, gen.n(), gen.backbone_id())
        .with_dispersion(std)
        .with_n_real(real.n())
        .with_seed(Some(spec.seed)))
}
